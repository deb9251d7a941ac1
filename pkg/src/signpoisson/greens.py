"""Closed-form Green kernels and torsion functions of half-spaces, balls, wedges and sectors."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoincidentPoints, ConfigError, PointOutsideWedge, TruncationFailure
from .radial import newton_constant


@dataclass(frozen=True)
class Hyperplane:
    """Boundary of the half-space ``{x : (x - point) . normal > 0}``."""

    point: tuple[float, ...]
    normal: tuple[float, ...]

    def reflect(self, x: np.ndarray) -> np.ndarray:
        n = np.asarray(self.normal, dtype=float)
        n = n / np.linalg.norm(n)
        return x - 2.0 * ((x - np.asarray(self.point, dtype=float)) @ n) * n

    def signed_distance(self, x: np.ndarray) -> float:
        n = np.asarray(self.normal, dtype=float)
        return float((x - np.asarray(self.point, dtype=float)) @ (n / np.linalg.norm(n)))


def coordinate_halfspace(m: int) -> Hyperplane:
    """``{x_m > 0}``."""
    normal = [0.0] * m
    normal[-1] = 1.0
    return Hyperplane(tuple([0.0] * m), tuple(normal))


def halfspace_green(m: int, x, y, boundary: Hyperplane | None = None) -> float:
    """Dirichlet Green function of a half-space via the image of ``x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (m,) or y.shape != (m,):
        raise ValueError(f"points must have {m} coordinates")
    if boundary is None:
        boundary = coordinate_halfspace(m)
    if boundary.signed_distance(x) <= 0 or boundary.signed_distance(y) < 0:
        raise ValueError("points must lie in the half-space")
    d = np.linalg.norm(x - y)
    if d == 0.0:
        raise CoincidentPoints("x and y coincide")
    d_img = np.linalg.norm(boundary.reflect(x) - y)
    if m == 2:
        return math.log(d_img / d) / (2 * math.pi)
    return newton_constant(m) * (d ** (2 - m) - d_img ** (2 - m))


def ball_center_green(m: int, R: float, rho: float) -> float:
    """Green function of B_R with the pole at the center, at distance ``rho``."""
    if rho <= 0:
        raise CoincidentPoints("rho = 0 is the pole")
    if rho > R:
        raise ValueError("rho must not exceed R")
    if m == 2:
        return math.log(R / rho) / (2 * math.pi)
    return R ** (2 - m) * newton_constant(m) * ((rho / R) ** (2 - m) - 1.0)


@dataclass(frozen=True)
class WedgeSpec:
    """Wedge of opening ``alpha`` bisected by the positive first axis, optionally cut at radius ``a``."""

    alpha: float
    a: float | None = None

    def __post_init__(self):
        if not 0 < self.alpha < math.pi / 2:
            raise ConfigError(f"opening angle must lie in (0, pi/2), got {self.alpha}")
        if self.a is not None and not self.a > 0:
            raise ConfigError("sector radius must be positive")

    @property
    def s(self) -> float:
        return math.tan(self.alpha / 2)

    @classmethod
    def from_area(cls, alpha: float, c: float) -> "WedgeSpec":
        """Sector of opening ``alpha`` and area ``c``."""
        return cls(alpha, math.sqrt(2 * c / alpha))


def wedge_torsion(spec: WedgeSpec, x) -> float:
    """Torsion function of the infinite wedge, ``(x2² - s²x1²) / (2(s² - 1))``."""
    x1, x2 = (float(c) for c in x)
    s = spec.s
    if x1 < 0 or abs(x2) > s * x1 * (1 + 1e-14):
        raise PointOutsideWedge(f"({x1}, {x2}) is outside the wedge")
    return max((x2 * x2 - s * s * x1 * x1) / (2 * (s * s - 1)), 0.0)


def sector_torsion(spec: WedgeSpec, r: float, theta: float, tol: float = 1e-12,
                   max_terms: int = 1_000_000) -> float:
    """Torsion function of the circular sector in polar coordinates.

    The closed part ``(r²/4)(cos 2θ / cos α - 1)`` is corrected by a series in
    odd ``n`` whose terms carry ``(r/a)**(nπ/α)``.  On the bisector the series
    alternates with decreasing terms, so summation stops once the next term
    (times the series prefactor) is below ``tol``.  Off the bisector the remainder after term ``n`` is
    bounded by ``|t_{n+2}| / (1 - q)`` with ``q = (r/a)**(2π/α)``.
    """
    if spec.a is None:
        raise ConfigError("sector_torsion needs a finite sector radius")
    alpha, a = spec.alpha, spec.a
    if not 0 <= r <= a or abs(theta) > alpha / 2 * (1 + 1e-14):
        raise PointOutsideWedge(f"(r={r}, theta={theta}) is outside the sector")
    if r == 0:
        return 0.0
    head = (r * r / 4) * (math.cos(2 * theta) / math.cos(alpha) - 1)
    b = 2 * alpha / math.pi
    rho = r / a
    q = rho ** (2 * math.pi / alpha)
    on_axis = theta == 0.0
    if not on_axis and q >= 1.0:
        raise TruncationFailure("no tail bound on the arc away from the bisector")
    log_rho = math.log(rho)
    scale = 4 * a * a * alpha * alpha / math.pi**3
    terms: list[float] = []
    chunk = 64
    n0 = 1
    while True:
        n = np.arange(n0, n0 + 2 * chunk, 2, dtype=float)
        sign = np.where(((n + 1) / 2) % 2 == 0, 1.0, -1.0)
        mag = np.exp(n * math.pi / alpha * log_rho) / (n * (n + b) * (n - b))
        t = sign * mag * np.cos(n * math.pi * theta / alpha)
        if on_axis:
            small = np.flatnonzero(scale * mag < tol)
            if len(small):
                stop = small[0]
                terms.extend(t[:stop].tolist())
                break
        else:
            tail = mag / (1.0 - q)
            small = np.flatnonzero(scale * tail < tol)
            if len(small):
                stop = small[0]
                terms.extend(t[:stop].tolist())
                break
        terms.extend(t.tolist())
        n0 += 2 * chunk
        if len(terms) >= max_terms:
            raise TruncationFailure(f"series did not reach tolerance {tol:g} in {max_terms} terms")
    return head + scale * math.fsum(terms)
