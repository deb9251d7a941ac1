"""Schwarz rearrangement of grid sets and fields, and the Talenti comparison on the ball."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotNonnegative
from .fdpoisson import RelaxedSet, ScalarField, _values
from .geometry import GridDomain
from .radial import annulus_config, ball_volume, solve_radial


@dataclass(frozen=True)
class RearrangedProfile:
    """Ball-equivalent data of a set A inside a domain.

    ``radius`` is the radius of the ball with the mass of A; ``r1`` and
    ``r2`` are the radii of balls with the measures of the complement of A
    and of the whole domain.
    """

    mass: float
    radius: float
    m: int
    r1: float
    r2: float


def equivalent_radius(mass: float, m: int = 2) -> float:
    return (mass / ball_volume(m)) ** (1.0 / m) if mass > 0 else 0.0


def rearrange_set(g, dom: GridDomain) -> RearrangedProfile:
    dens = _values(g)
    mass = dom.cell_area * math.fsum(dens)
    rest = dom.cell_area * math.fsum(1.0 - dens)
    return RearrangedProfile(
        mass=mass,
        radius=equivalent_radius(mass),
        m=2,
        r1=equivalent_radius(rest),
        r2=equivalent_radius(dom.area),
    )


def decreasing_rearrangement(field: ScalarField) -> tuple[np.ndarray, np.ndarray]:
    """Sorted values (largest first) and the area enclosed at each (cell midpoints)."""
    vals = np.sort(field.values)[::-1]
    areas = (np.arange(len(vals)) + 0.5) * field.dom.cell_area
    return areas, vals


@dataclass(frozen=True)
class TalentiReport:
    areas: np.ndarray
    v_star: np.ndarray
    v_radial: np.ndarray
    tolerance: float

    @property
    def excess(self) -> np.ndarray:
        return self.v_star - self.v_radial

    @property
    def violations(self) -> np.ndarray:
        return np.flatnonzero(self.excess > self.tolerance)

    @property
    def max_excess(self) -> float:
        return float(self.excess.max())


def talenti_compare(v: ScalarField, gamma: float, profile: RearrangedProfile,
                    tol: float = 5e-3) -> TalentiReport:
    """Compare the decreasing rearrangement of a nonnegative ``v`` with the radial solution
    whose source is γ on B_{r1} and -(1-γ) on B_{r2} minus B_{r1}."""
    if v.min < -tol:
        raise NotNonnegative(f"field minimum {v.min:.3g} is below -{tol:g}")
    areas, vals = decreasing_rearrangement(v)
    sol = solve_radial(annulus_config(2, profile.r1, profile.r2, gamma))
    radii = np.minimum(np.sqrt(areas / math.pi), profile.r2)
    return TalentiReport(areas, vals, sol.value(radii), tol)
