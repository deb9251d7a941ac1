"""Explicit constants, thresholds and bounds for the sign question.

Every function is a plain formula evaluator.  The bottom Dirichlet
eigenvalue of the unit ball, ``j_{m/2-1,1}**2``, is computed here from a
power-series evaluation of the Bessel function and bisection, so the module
needs nothing beyond the standard library.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

from .radial import ball_volume


def bessel_j(nu: float, x: float, terms: int = 40) -> float:
    """``J_nu(x)`` from its power series; accurate for moderate ``x`` (``x`` up to ~15)."""
    if x == 0:
        return 1.0 if nu == 0 else 0.0
    half = 0.5 * x
    # first term computed in log form so large nu does not overflow
    t = math.exp(nu * math.log(half) - math.lgamma(nu + 1))
    acc = [t]
    q = half * half
    for k in range(terms - 1):
        t = -t * q / ((k + 1) * (k + 1 + nu))
        acc.append(t)
    return math.fsum(acc)


@lru_cache(maxsize=None)
def bessel_zero(nu: float, tol: float = 1e-14) -> float:
    """First positive zero of ``J_nu`` for ``nu >= 0``."""
    step = 0.05
    lo = max(nu, step)
    flo = bessel_j(nu, lo)
    hi = lo + step
    while bessel_j(nu, hi) * flo > 0:
        lo, hi = hi, hi + step
        flo = bessel_j(nu, lo)
        if hi > nu + 3 * nu ** (1 / 3) + 10:
            raise RuntimeError(f"no sign change found for J_{nu}")
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        fm = bessel_j(nu, mid)
        if fm * flo > 0:
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ball_eigenvalue(m: int, R: float = 1.0) -> float:
    """Bottom Dirichlet eigenvalue of B_R in R^m."""
    return bessel_zero(m / 2 - 1) ** 2 / (R * R)


def ball_torsional_rigidity(m: int, R: float = 1.0) -> float:
    return ball_volume(m) * R ** (m + 2) / (m * (m + 2))


def c_plus(gamma: float, area: float) -> float:
    """Mass beyond which every source set forces a sign change: ``γ |Ω|``."""
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    if not area > 0:
        raise ValueError("area must be positive")
    return gamma * area


def c_minus_ball_bounds(m: int, gamma: float, R: float) -> tuple[float, float]:
    """Lower and upper bounds on the critical mass of the ball B_R."""
    if m < 2:
        raise ValueError("m must be >= 2")
    w = ball_volume(m)
    lower = (gamma / (4 * m)) ** m * w * R**m
    if m == 2:
        upper = gamma * math.pi * R * R / (1 + math.log(1 / gamma))
    else:
        upper = gamma ** (m / 2) * w * R**m
    return lower, upper


def kj_constant(m: int) -> float:
    """Kohler-Jobin constant ``λ(B_1) T(B_1)^{2/(m+2)}`` (the ball is the minimizer)."""
    return ball_eigenvalue(m) * ball_torsional_rigidity(m) ** (2 / (m + 2))


def log_eigenvalue_bound_constant(m: int) -> float:
    """Natural log of the constant in the eigenvalue upper bound on the critical mass."""
    w = ball_volume(m)
    lam = ball_eigenvalue(m)
    c2 = kj_constant(m)
    return (
        (m + 2) / 2 * math.log(w)
        + 5 * m * m / 12 * math.log(2)
        + m * (m + 2) / 4 * math.log(3)
        + 2 ** (1 / m) * math.sqrt(lam) / 24
        + m * (m + 2) / 2 * math.log(12 * m * (m + 2) / (math.e * math.sqrt(c2)))
    )


def eigenvalue_bound_constant(m: int) -> float:
    try:
        return math.exp(log_eigenvalue_bound_constant(m))
    except OverflowError:
        return math.inf


def eigenvalue_upper(m: int, gamma: float, lam: float) -> float:
    """Upper bound on the critical mass from the bottom eigenvalue ``lam``."""
    if not lam > 0:
        raise ValueError("eigenvalue must be positive")
    return eigenvalue_bound_constant(m) * (gamma / (1 - gamma)) ** (m / 2) * lam ** (-m / 2)


def torsion_upper(m: int, gamma: float, T: float) -> float:
    """Upper bound on the critical mass from the torsional rigidity ``T``."""
    if not T > 0:
        raise ValueError("torsional rigidity must be positive")
    return (
        eigenvalue_bound_constant(m)
        * kj_constant(m) ** (-m / 2)
        * (gamma / (1 - gamma)) ** (m / 2)
        * T ** (m / (m + 2))
    )


def negativity_level(m: int, gamma: float) -> float:
    """Torsion level ``(1-γ)/(2mγ)``: if ``v_Ω`` stays below it on a unit ball, that ball as A makes v(center) <= 0."""
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    return (1 - gamma) / (2 * m * gamma)


def averaging_radius(m: int, gamma: float) -> float:
    """Radius r with ``r²/(2(m+2)) = (1-γ)/(4mγ)``."""
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    return math.sqrt((m + 2) * (1 - gamma) / (2 * m * gamma))


def integral_threshold(m: int, gamma: float, R: float) -> float:
    """Mass of A below which ``∫ v >= 0`` on any domain with R-smooth boundary."""
    if m < 2:
        raise ValueError("m must be >= 2")
    if m == 2:
        return (10 + 7 * math.sqrt(7)) / 324 * gamma * math.pi * R * R
    return m / (6 * (m - 1) ** 2) * gamma * ball_volume(m) * R**m


def torsion_linf_bounds(m: int, lam: float) -> tuple[float, float]:
    """Two-sided bound on ``sup v_Ω`` in terms of the bottom eigenvalue."""
    if not lam > 0:
        raise ValueError("eigenvalue must be positive")
    return 1 / lam, (4 + 3 * m * math.log(2)) / lam


@dataclass(frozen=True)
class BoundsReport:
    m: int
    gamma: float
    R: float
    c_plus: float
    c_minus_lower: float
    c_minus_upper: float
    torsion_bound_upper: float
    kj_constant: float
    eigenvalue_bound_constant: float
    log_eigenvalue_bound_constant: float
    eigenvalue_upper: float
    torsion_upper: float
    negativity_level: float
    averaging_radius: float
    integral_threshold: float

    def rows(self) -> list[tuple[str, float]]:
        return list(asdict(self).items())


def bounds_report(m: int, gamma: float, R: float = 1.0) -> BoundsReport:
    """All bounds evaluated for the ball B_R (its eigenvalue and torsional rigidity)."""
    lam = ball_eigenvalue(m, R)
    T = ball_torsional_rigidity(m, R)
    lower, upper = c_minus_ball_bounds(m, gamma, R)
    return BoundsReport(
        m=m,
        gamma=gamma,
        R=R,
        c_plus=c_plus(gamma, ball_volume(m) * R**m),
        c_minus_lower=lower,
        c_minus_upper=upper,
        torsion_bound_upper=torsion_linf_bounds(m, lam)[1],
        kj_constant=kj_constant(m),
        eigenvalue_bound_constant=eigenvalue_bound_constant(m),
        log_eigenvalue_bound_constant=log_eigenvalue_bound_constant(m),
        eigenvalue_upper=eigenvalue_upper(m, gamma, lam),
        torsion_upper=torsion_upper(m, gamma, T),
        negativity_level=negativity_level(m, gamma),
        averaging_radius=averaging_radius(m, gamma),
        integral_threshold=integral_threshold(m, gamma, R),
    )
