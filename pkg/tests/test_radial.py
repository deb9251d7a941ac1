import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from signpoisson import (RadialConfig, central_value_ball, central_value_disk, find_rc, min_radial,
                         solve_radial)
from signpoisson.errors import ConfigError
from signpoisson.radial import (annulus_config, ball_config, ball_torsion, radial_set_config,
                                sample, talenti_threshold)

from conftest import R_C


def quadrature_value(cfg: RadialConfig, r: float) -> float:
    """Independent oracle: integrate v'(s) = -s^{1-m} ∫_0^s t^{m-1} f(t) dt from r to R."""
    bp = np.asarray(cfg.breakpoints)
    f = cfg.gamma - np.asarray(cfg.densities)
    m = cfg.m

    def enclosed(s):
        total = 0.0
        for i in range(len(f)):
            lo, hi = bp[i], min(bp[i + 1], s)
            if hi > lo:
                total += f[i] * (hi**m - lo**m) / m
        return total

    val, _ = quad(lambda s: enclosed(s) / s ** (m - 1), r, cfg.R, points=list(bp[1:-1]),
                  epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def test_pure_torsion_disk():
    sol = solve_radial(RadialConfig(2, (0, 1), (0,), 1.0))
    r = np.linspace(0, 1, 11)
    np.testing.assert_allclose(sol.value(r), (1 - r * r) / 4, atol=1e-15)
    assert sol.value(0.0) == pytest.approx(0.25)


@pytest.mark.parametrize("m, a, expected, tol", [
    (2, R_C, 0.0, 1e-6),
    (3, 0.5, 0.0, 1e-14),
])
def test_center_values(m, a, expected, tol):
    assert solve_radial(ball_config(m, 1.0, a, 0.5)).value(0.0) == pytest.approx(expected, abs=tol)


def test_m3_center_value_polynomial():
    # gamma/6 - a^2/2 + a^3/3
    for a in (0.2, 0.5, 0.8):
        assert central_value_ball(3, 0.5, a) == pytest.approx(0.5 / 6 - a * a / 2 + a**3 / 3, abs=1e-15)


@pytest.mark.parametrize("gamma, a", [(0.5, 0.3), (0.5, 0.5), (0.2, 0.1), (0.8, 0.7)])
def test_central_value_disk_matches_radial_and_quadrature(gamma, a):
    cfg = ball_config(2, 1.0, a, gamma)
    exact = central_value_disk(gamma, a)
    assert solve_radial(cfg).value(0.0) == pytest.approx(exact, abs=1e-14)
    assert quadrature_value(cfg, 0.0) == pytest.approx(exact, abs=1e-10)


def test_central_value_disk_examples():
    assert central_value_disk(0.5, 0.3) == pytest.approx(0.048321, abs=1e-6)
    assert central_value_disk(0.5, R_C) == pytest.approx(0.0, abs=1e-6)
    assert central_value_disk(0.37, 1e-9) == pytest.approx(0.37 / 4, abs=1e-12)


@pytest.mark.parametrize("m, gamma, a", [(3, 0.5, 0.5), (4, 0.3, 0.6), (5, 0.7, 0.4)])
def test_central_value_ball_matches_radial(m, gamma, a):
    cfg = ball_config(m, 1.0, a, gamma)
    assert central_value_ball(m, gamma, a) == pytest.approx(solve_radial(cfg).value(0.0), abs=1e-14)
    assert central_value_ball(m, gamma, a) == pytest.approx(quadrature_value(cfg, 0.0), abs=1e-10)


def test_central_value_ball_limits():
    assert central_value_ball(3, 0.5, 1e-9) == pytest.approx(1 / 12, abs=1e-12)
    for gamma in (0.1, 0.5, 0.9):
        assert central_value_ball(3, gamma, math.sqrt(gamma)) <= 0


def test_find_rc():
    rc = find_rc()
    assert rc == pytest.approx(0.432067, abs=1e-5)
    assert central_value_disk(0.5, rc) == pytest.approx(0.0, abs=1e-9)
    assert central_value_disk(0.5, 0.3) > 0 > central_value_disk(0.5, 0.6)


@pytest.mark.parametrize("m, gamma, r2, expected", [
    (2, 0.5, 1.0, 0.7071068),
    (3, 7 / 8, 1.0, 0.5),
    (2, 1e-12, 1.7, 1.7),
])
def test_talenti_threshold(m, gamma, r2, expected):
    assert talenti_threshold(m, gamma, r2) == pytest.approx(expected, abs=1e-7)


@pytest.mark.parametrize("m, gamma", [(2, 0.5), (3, 0.3), (4, 0.8)])
def test_talenti_threshold_sign_of_outer_slope(m, gamma):
    r1min = talenti_threshold(m, gamma, 1.0)
    for r1 in np.linspace(0.05, 0.95, 19):
        slope = solve_radial(annulus_config(m, r1, 1.0, gamma)).derivative(1.0)
        if abs(r1 - r1min) > 1e-9:
            assert (slope <= 1e-12) == (r1 >= r1min)


def test_min_radial_examples():
    assert min_radial(solve_radial(RadialConfig(2, (0, 1), (0,), 1.0))) == (1.0, 0.0)
    r, v = min_radial(solve_radial(ball_config(2, 1.0, 0.5, 0.5)))
    assert r == 0.0
    assert v == pytest.approx(central_value_disk(0.5, 0.5), abs=1e-15)
    # independent evaluation of the closed form
    assert v == pytest.approx(0.125 - 0.0625 + 0.0625 * math.log(0.25), abs=1e-15)
    r, v = min_radial(solve_radial(ball_config(2, 1.0, 0.3, 0.5)))
    assert (r, v) == (1.0, pytest.approx(0.0, abs=1e-15))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.floats(0.05, 0.95),
       st.lists(st.tuples(st.floats(0.01, 1), st.floats(0, 1)), min_size=1, max_size=5))
def test_min_radial_beats_sampling(m, gamma, shells):
    widths = np.cumsum([w for w, _ in shells])
    cfg = RadialConfig(m, (0.0, *widths), tuple(d for _, d in shells), gamma)
    sol = solve_radial(cfg)
    _, vmin = min_radial(sol)
    samples = sol.value(np.linspace(0, cfg.R, 2001))
    assert vmin <= samples.min() + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.floats(0.05, 1.0),
       st.lists(st.tuples(st.floats(0.01, 1), st.floats(0, 1)), min_size=1, max_size=5))
def test_exact_identities(m, gamma, shells):
    widths = np.cumsum([w for w, _ in shells])
    cfg = RadialConfig(m, (0.0, *widths), tuple(d for _, d in shells), gamma)
    sol = solve_radial(cfg)
    np.testing.assert_allclose(2 * m * sol.quad, -cfg.sources, rtol=0, atol=1e-15)
    rng = np.random.default_rng(0)
    r = rng.uniform(1e-3, cfg.R, 200)
    np.testing.assert_allclose(sol.flux(r), sol.enclosed_source(r), rtol=0,
                               atol=1e-12 * max(1.0, cfg.R**m))
    # continuity at breakpoints and zero boundary value
    for b in cfg.breakpoints[1:-1]:
        assert sol.value(b * (1 - 1e-13)) == pytest.approx(sol.value(b), abs=1e-11 * max(1, cfg.R**2))
    assert sol.value(cfg.R) == pytest.approx(0.0, abs=1e-12 * max(1, cfg.R**2))
    assert sol.value(0.3 * cfg.R) == pytest.approx(quadrature_value(cfg, 0.3 * cfg.R), abs=1e-9)
    # sandwich
    vt = ball_torsion(m, cfg.R, r)
    v = sol.value(r)
    assert np.all(v <= gamma * vt + 1e-12) and np.all(v >= -(1 - gamma) * vt - 1e-12)


def test_concentric_ball_is_worst_radial_set():
    rng = np.random.default_rng(9)
    radii = np.linspace(0, 1, 100)
    for _ in range(50):
        m = int(rng.integers(2, 5))
        gamma = rng.uniform(0.1, 0.9)
        bp = np.sort(rng.uniform(0, 1, 4))
        dens = rng.uniform(0, 1, 5)
        cfg = radial_set_config(m, 1.0, bp, dens, gamma)
        a = cfg.mass() / (math.pi ** (m / 2) / math.gamma(m / 2 + 1))
        ball = ball_config(m, 1.0, a ** (1 / m), gamma)
        assert np.all(solve_radial(cfg).value(radii) >= solve_radial(ball).value(radii) - 1e-12)


def test_sample_columns():
    s = sample(solve_radial(ball_config(2, 1.0, 0.4, 0.5)), 11)
    assert s.shape == (11, 3)
    assert s[0, 0] == 0 and s[-1, 0] == 1 and s[-1, 1] == pytest.approx(0, abs=1e-15)


@pytest.mark.parametrize("kwargs", [
    dict(m=1, breakpoints=(0, 1), densities=(0,), gamma=0.5),
    dict(m=2, breakpoints=(0.1, 1), densities=(0,), gamma=0.5),
    dict(m=2, breakpoints=(0, 0.5, 0.4), densities=(0, 1), gamma=0.5),
    dict(m=2, breakpoints=(0, 1), densities=(1.2,), gamma=0.5),
    dict(m=2, breakpoints=(0, 1), densities=(0,), gamma=0.0),
])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        RadialConfig(**kwargs)
