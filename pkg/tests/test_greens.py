import math

import numpy as np
import pytest

from signpoisson import RelaxedSet, Sector, rasterize, solve_indicator, torsion_field
from signpoisson.errors import CoincidentPoints, ConfigError, PointOutsideWedge
from signpoisson.geometry import equilateral_triangle
from signpoisson.greens import (Hyperplane, WedgeSpec, ball_center_green, coordinate_halfspace,
                                halfspace_green, sector_torsion, wedge_torsion)


@pytest.mark.parametrize("m, x, y, expected", [
    (2, (0, 1), (0, 2), math.log(3) / (2 * math.pi)),
    (3, (0, 0, 1), (0, 0, 2), 1 / (6 * math.pi)),
])
def test_halfspace_examples(m, x, y, expected):
    assert halfspace_green(m, x, y) == pytest.approx(expected, rel=1e-12)
    assert halfspace_green(2, (0, 1), (0, 2)) == pytest.approx(0.174850, abs=1e-6)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_halfspace_vanishes_on_boundary(m):
    rng = np.random.default_rng(m)
    x = np.append(rng.normal(size=m - 1), 1.3)
    y = np.append(rng.normal(size=m - 1), 0.0)
    assert halfspace_green(m, x, y) == pytest.approx(0.0, abs=1e-15)


def test_halfspace_symmetric_and_general_plane():
    plane = Hyperplane((1.0, 1.0), (1.0, 1.0))
    x, y = np.array([2.0, 1.5]), np.array([1.2, 3.0])
    assert halfspace_green(2, x, y, plane) == pytest.approx(halfspace_green(2, y, x, plane), rel=1e-12)
    with pytest.raises(CoincidentPoints):
        halfspace_green(2, x, x, plane)


@pytest.mark.parametrize("m, R, rho, expected", [
    (2, 1.0, 1 / math.e, 1 / (2 * math.pi)),
    (3, 1.0, 0.5, 1 / (4 * math.pi)),
    (3, 2.0, 1.0, 0.5 / (4 * math.pi)),
    (2, 3.0, 3.0, 0.0),
])
def test_ball_center_green(m, R, rho, expected):
    assert ball_center_green(m, R, rho) == pytest.approx(expected, abs=1e-15)


def test_ball_center_pole_rejected():
    with pytest.raises(CoincidentPoints):
        ball_center_green(3, 1.0, 0.0)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_ball_below_tangent_halfspace(m):
    """Domain monotonicity: the ball inside a tangent half-space has the smaller kernel."""
    rng = np.random.default_rng(10 + m)
    for _ in range(100):
        R = rng.uniform(0.2, 3)
        d = rng.normal(size=m)
        y = d / np.linalg.norm(d) * rng.uniform(0.01, 0.999) * R
        center = np.zeros(m)
        center[-1] = R
        g_ball = ball_center_green(m, R, float(np.linalg.norm(y)))
        g_half = halfspace_green(m, center, center + y, coordinate_halfspace(m))
        assert 0 <= g_ball <= g_half + 1e-15


@pytest.mark.parametrize("m", [3, 4, 5])
def test_image_difference_bound(m):
    rng = np.random.default_rng(m)
    plane = coordinate_halfspace(m)
    for _ in range(1000):
        x = rng.normal(size=m)
        y = rng.normal(size=m)
        x[-1], y[-1] = abs(x[-1]), abs(y[-1])
        xs = plane.reflect(x)
        diff = np.linalg.norm(x - y) ** (2 - m) - np.linalg.norm(xs - y) ** (2 - m)
        bound = (m - 2) * np.linalg.norm(x - xs) * np.linalg.norm(x - y) ** (1 - m)
        assert -1e-12 <= diff <= bound * (1 + 1e-12)


@pytest.mark.parametrize("alpha, x, expected", [
    (math.pi / 3, (1, 0), 0.25),
    (math.pi / 4, (2, 0), math.sqrt(2) - 1),
])
def test_wedge_torsion(alpha, x, expected):
    assert wedge_torsion(WedgeSpec(alpha), x) == pytest.approx(expected, rel=1e-12)


def test_wedge_edge_and_outside():
    spec = WedgeSpec(math.pi / 3)
    assert wedge_torsion(spec, (1.0, spec.s)) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(PointOutsideWedge):
        wedge_torsion(spec, (1.0, 1.0))


@pytest.mark.parametrize("alpha", [0.0, math.pi / 2, 2.0])
def test_wedge_opening_range(alpha):
    with pytest.raises(ConfigError):
        WedgeSpec(alpha)


def test_wedge_solves_poisson():
    spec = WedgeSpec(math.pi / 5)
    x, eps = np.array([1.0, 0.05]), 1e-3
    lap = sum(wedge_torsion(spec, x + eps * e) + wedge_torsion(spec, x - eps * e)
              for e in np.eye(2)) - 4 * wedge_torsion(spec, x)
    assert -lap / eps**2 == pytest.approx(1.0, abs=1e-6)


def test_sector_origin_and_arc():
    spec = WedgeSpec(math.pi / 3, 1.0)
    tol = 1e-12
    assert sector_torsion(spec, 0.0, 0.0) == 0.0
    assert abs(sector_torsion(spec, 1.0 - 1e-9, 0.0, tol=tol)) <= 5 * tol + 1e-9


def test_sector_outside():
    with pytest.raises(PointOutsideWedge):
        sector_torsion(WedgeSpec(math.pi / 3, 1.0), 0.5, 0.6)


def test_sector_against_grid():
    a = 1.0
    spec = WedgeSpec(math.pi / 3, a)
    dom = rasterize(Sector((0, 0), math.pi / 6, a), 1 / 512)
    v = torsion_field(dom, method="direct")
    assert v.at((0.5, 0)) == pytest.approx(sector_torsion(spec, 0.5, 0.0), abs=2e-3)
    rng = np.random.default_rng(1)
    for k in rng.choice(dom.count, 20, replace=False):
        x, y = dom.centers[k]
        exact = sector_torsion(spec, math.hypot(x, y), math.atan2(y, x))
        assert v.values[k] == pytest.approx(exact, abs=2e-3)


def test_sector_below_wedge():
    spec = WedgeSpec(math.pi / 4, 1.0)
    for r in (0.2, 0.5, 0.9):
        for th in (0.0, 0.1, -0.3):
            assert sector_torsion(spec, r, th) <= wedge_torsion(spec, (r * math.cos(th), r * math.sin(th))) + 1e-12


def test_from_area():
    spec = WedgeSpec.from_area(math.pi / 3, 0.01)
    assert spec.alpha * spec.a**2 / 2 == pytest.approx(0.01)


def test_triangle_vertex_sector_goes_negative():
    tri = equilateral_triangle(1.0)
    spec = WedgeSpec.from_area(math.pi / 3, 0.01)
    sector = Sector((0, 0), math.pi / 6, spec.a, (math.cos(math.pi / 6), math.sin(math.pi / 6)))
    dom = rasterize(tri, 1 / 256)
    v = solve_indicator(dom, RelaxedSet.from_shape(dom, sector), 0.5, method="direct")
    assert v.min < 0
    assert math.hypot(*v.argmin_point) < spec.a
