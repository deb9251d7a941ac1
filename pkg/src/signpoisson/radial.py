"""Exact radial solutions of ``-Δv = γ - g`` on a ball in any dimension ``m >= 2``.

The density ``g`` is piecewise constant on concentric shells.  Inside shell
``i`` the solution is

    v(r) = q_i r**2 + b_i H(r) + c_i,    q_i = -(γ - g_i) / (2m),

with ``H(r) = log r`` for ``m == 2`` and ``r**(2-m)`` otherwise.  The
coefficients ``b_i`` come from the enclosed source (the flux
``-r**(m-1) v'(r)``) and the constants ``c_i`` from ``v(R) = 0`` and
continuity, integrating inward.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError


def ball_volume(m: int) -> float:
    """Volume of the unit ball in R^m."""
    return math.pi ** (m / 2) / math.gamma(m / 2 + 1)


def newton_constant(m: int) -> float:
    """``c_m = Γ((m-2)/2) / (4 π^{m/2})`` for ``m >= 3``."""
    if m < 3:
        raise ValueError("c_m is defined for m >= 3")
    return math.gamma((m - 2) / 2) / (4 * math.pi ** (m / 2))


@dataclass(frozen=True)
class RadialConfig:
    m: int
    breakpoints: tuple[float, ...]
    densities: tuple[float, ...]
    gamma: float

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        dens = tuple(float(g) for g in self.densities)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "densities", dens)
        if int(self.m) != self.m or self.m < 2:
            raise ConfigError(f"dimension must be an integer >= 2, got {self.m}")
        if len(bp) < 2 or bp[0] != 0.0:
            raise ConfigError("breakpoints must start at 0 and contain the outer radius")
        if any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])):
            raise ConfigError("breakpoints must be strictly increasing")
        if len(dens) != len(bp) - 1:
            raise ConfigError("need one density per shell")
        if any(not 0.0 <= g <= 1.0 for g in dens):
            raise ConfigError("densities must lie in [0, 1]")
        # gamma = 1 with g = 0 is the plain torsion problem
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError(f"gamma must lie in (0, 1], got {self.gamma}")

    @property
    def R(self) -> float:
        return self.breakpoints[-1]

    @property
    def sources(self) -> np.ndarray:
        return self.gamma - np.asarray(self.densities)

    def mass(self) -> float:
        """Measure of the (relaxed) set A."""
        bp = np.asarray(self.breakpoints)
        return float(ball_volume(self.m) * np.sum(np.asarray(self.densities) * np.diff(bp**self.m)))


def ball_config(m: int, R: float, a: float, gamma: float) -> RadialConfig:
    """A = concentric ball of radius ``a`` inside B_R."""
    if a <= 0:
        return RadialConfig(m, (0.0, R), (0.0,), gamma)
    if a >= R:
        return RadialConfig(m, (0.0, R), (1.0,), gamma)
    return RadialConfig(m, (0.0, a, R), (1.0, 0.0), gamma)


def annulus_config(m: int, r1: float, r2: float, gamma: float) -> RadialConfig:
    """A = B_{r2} minus B_{r1}: positive source inside, negative in the outer shell."""
    if r1 <= 0:
        return RadialConfig(m, (0.0, r2), (1.0,), gamma)
    if r1 >= r2:
        return RadialConfig(m, (0.0, r2), (0.0,), gamma)
    return RadialConfig(m, (0.0, r1, r2), (0.0, 1.0), gamma)


@dataclass(frozen=True)
class RadialSolution:
    config: RadialConfig
    quad: np.ndarray
    harm: np.ndarray
    const: np.ndarray
    enclosed: np.ndarray = field(repr=False)  # flux -r^{m-1} v' at each inner breakpoint

    @property
    def m(self) -> int:
        return self.config.m

    @property
    def R(self) -> float:
        return self.config.R

    def _harmonic(self, r):
        if self.m == 2:
            return np.log(r)
        return r ** (2.0 - self.m)

    def _harmonic_prime(self, r):
        if self.m == 2:
            return 1.0 / r
        return (2.0 - self.m) * r ** (1.0 - self.m)

    def _shell(self, r: np.ndarray) -> np.ndarray:
        bp = np.asarray(self.config.breakpoints)
        return np.clip(np.searchsorted(bp, r, side="right") - 1, 0, len(bp) - 2)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0) or np.any(r > self.R * (1 + 1e-12)):
            raise ValueError("radius outside [0, R]")
        i = self._shell(r)
        b = self.harm[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            h = np.where(b != 0.0, b * self._harmonic(np.where(r > 0, r, 1.0)), 0.0)
        out = self.quad[i] * r * r + h + self.const[i]
        return float(out) if out.ndim == 0 else out

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        i = self._shell(r)
        b = self.harm[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            h = np.where(b != 0.0, b * self._harmonic_prime(np.where(r > 0, r, 1.0)), 0.0)
        out = 2.0 * self.quad[i] * r + h
        return float(out) if out.ndim == 0 else out

    def flux(self, r):
        """``-r**(m-1) v'(r)``; equals the source integrated over [0, r] with weight s**(m-1)."""
        r = np.asarray(r, dtype=float)
        return -(r ** (self.m - 1)) * self.derivative(r)

    def enclosed_source(self, r):
        """``∫_0^r s**(m-1) (γ - g(s)) ds`` evaluated shell by shell."""
        r = np.asarray(r, dtype=float)
        i = self._shell(r)
        bp = np.asarray(self.config.breakpoints)
        f = self.config.sources
        out = self.enclosed[i] + f[i] * (r**self.m - bp[i] ** self.m) / self.m
        return float(out) if out.ndim == 0 else out


def solve_radial(cfg: RadialConfig) -> RadialSolution:
    m = cfg.m
    bp = np.asarray(cfg.breakpoints)
    f = cfg.sources
    k = len(f)
    quad = -f / (2.0 * m)
    # forward: enclosed source at each inner breakpoint
    enclosed = np.zeros(k)
    for i in range(1, k):
        enclosed[i] = enclosed[i - 1] + f[i - 1] * (bp[i] ** m - bp[i - 1] ** m) / m
    # v' = -f r/m - K_i / r^{m-1} with K_i = enclosed_i - f_i rho_i^m / m
    K = enclosed - f * bp[:-1] ** m / m
    K[0] = 0.0
    harm = -K if m == 2 else K / (m - 2.0)

    def H(r):
        return math.log(r) if m == 2 else r ** (2.0 - m)

    const = np.zeros(k)
    R = bp[-1]
    const[-1] = -quad[-1] * R * R - (harm[-1] * H(R) if harm[-1] != 0.0 else 0.0)
    for i in range(k - 2, -1, -1):
        rho = bp[i + 1]
        outer = quad[i + 1] * rho * rho + harm[i + 1] * H(rho) + const[i + 1]
        inner = quad[i] * rho * rho + (harm[i] * H(rho) if harm[i] != 0.0 else 0.0)
        const[i] = outer - inner
    return RadialSolution(cfg, quad, harm, const, enclosed)


def min_radial(sol: RadialSolution) -> tuple[float, float]:
    """Global minimum of ``v`` on [0, R] as ``(radius, value)``.

    Candidates are 0, the breakpoints and the interior stationary points of
    each shell, where ``r**m = -m K_i / f_i``.
    """
    m = sol.m
    bp = np.asarray(sol.config.breakpoints)
    f = sol.config.sources
    cands = list(bp)
    for i in range(len(f)):
        if f[i] == 0.0:
            continue
        K = sol.enclosed[i] - f[i] * bp[i] ** m / m if i > 0 else 0.0
        rm = -m * K / f[i]
        if rm > 0:
            r = rm ** (1.0 / m)
            if bp[i] < r < bp[i + 1]:
                cands.append(r)
    cands = np.array(sorted(cands))
    vals = np.atleast_1d(sol.value(cands))
    j = int(np.argmin(vals))
    return float(cands[j]), float(vals[j])


def central_value_disk(gamma: float, a: float) -> float:
    """``v(0)`` on the unit disk with A the concentric disk of radius ``a``."""
    if a <= 0:
        return gamma / 4
    return gamma / 4 - a * a / 4 + (a * a / 4) * math.log(a * a)


def central_value_ball(m: int, gamma: float, a: float) -> float:
    """``v(0)`` on the unit ball of R^m (``m >= 3``) with A = B_a, in closed form."""
    if m < 3:
        raise ValueError("use central_value_disk for m = 2")
    weight = newton_constant(m) * m * ball_volume(m)
    return gamma / (2 * m) - weight * (a * a / 2 - a**m / m)


def _rc_equation(r: float) -> float:
    return r * r / 2 - 0.25 - r * r * math.log(r)


def find_rc(iterations: int = 200, tol: float = 1e-15) -> float:
    """Radius of the concentric disk that makes ``v(0) = 0`` for γ = 1/2 on the unit disk."""
    lo, hi = 1e-12, 1.0 - 1e-12
    flo = _rc_equation(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        fm = _rc_equation(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def talenti_threshold(m: int, gamma: float, r2: float) -> float:
    """Smallest inner radius ``r1`` keeping ``v'(r2) <= 0`` when A = B_{r2} minus B_{r1}."""
    if r2 <= 0:
        raise ValueError("r2 must be positive")
    return (1.0 - gamma) ** (1.0 / m) * r2


def ball_torsion(m: int, R: float, r):
    return (R * R - np.asarray(r, dtype=float) ** 2) / (2 * m)


def sample(sol: RadialSolution, n: int) -> np.ndarray:
    """``(n, 3)`` array of ``(r, v, v')`` on an even grid of [0, R]."""
    r = np.linspace(0.0, sol.R, n)
    return np.column_stack([r, sol.value(r), sol.derivative(r)])


def radial_set_config(m: int, R: float, breakpoints: Sequence[float],
                      densities: Sequence[float], gamma: float) -> RadialConfig:
    return RadialConfig(m, tuple([0.0, *breakpoints, R]), tuple(densities), gamma)
