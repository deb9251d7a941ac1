import math

import numpy as np
import pytest

from signpoisson import Disk, NotNonnegative, RelaxedSet, solve_indicator
from signpoisson.rearrange import (decreasing_rearrangement, equivalent_radius, rearrange_set,
                                   talenti_compare)
from signpoisson.shapeopt import level_set_integral_opt


def test_half_the_cells(disk128):
    g = np.zeros(disk128.count)
    g[::2] = 1
    prof = rearrange_set(g, disk128)
    assert prof.mass == pytest.approx(math.pi / 2, rel=1e-3)
    assert prof.radius == pytest.approx(math.sqrt(0.5), abs=2 * disk128.h)


def test_empty_set(disk64):
    prof = rearrange_set(np.zeros(disk64.count), disk64)
    assert prof.mass == 0 and prof.radius == 0


def test_complement_radius(disk128, torsion128):
    g = level_set_integral_opt(disk128, 0.5, 0.3 * math.pi, "max", torsion128)
    prof = rearrange_set(g, disk128)
    assert prof.r1 == pytest.approx(math.sqrt(0.7), abs=2 * disk128.h)
    assert prof.r2 == pytest.approx(1.0, abs=2 * disk128.h)
    assert equivalent_radius(prof.mass) == prof.radius


def test_rearrangement_preserves_values(torsion128):
    areas, vals = decreasing_rearrangement(torsion128)
    assert np.array_equal(np.sort(vals), np.sort(torsion128.values))
    assert np.all(np.diff(vals) <= 0)
    assert areas[-1] < torsion128.dom.area


def test_ball_equality_case(disk128, torsion128):
    prof = rearrange_set(np.zeros(disk128.count), disk128)
    rep = talenti_compare(torsion128, 1.0, prof, tol=3e-3)
    assert np.max(np.abs(rep.excess)) <= 3e-3


def test_boundary_annulus(disk128, torsion128):
    g = level_set_integral_opt(disk128, 0.5, 0.4 * math.pi, "max", torsion128)
    v = solve_indicator(disk128, g, 0.5, method="direct")
    assert v.min >= -5e-3
    rep = talenti_compare(v, 0.5, rearrange_set(g, disk128), tol=5e-3)
    assert len(rep.violations) == 0


NONNEGATIVE_CASES = [
    # (gamma, kind, mass or shape)
    (0.5, "annulus", 0.40 * math.pi),
    (0.5, "annulus", 0.20 * math.pi),
    (0.3, "annulus", 0.25 * math.pi),
    (0.7, "annulus", 0.20 * math.pi),
    (0.9, "annulus", 0.05 * math.pi),
    (0.5, "disk", Disk((0.0, 0.0), 0.2)),
    (0.5, "disk", Disk((0.3, 0.1), 0.15)),
    (0.7, "disk", Disk((-0.2, 0.4), 0.25)),
    (0.3, "disk", Disk((0.6, 0.0), 0.1)),
    (0.5, "empty", None),
]


@pytest.mark.parametrize("gamma, kind, arg", NONNEGATIVE_CASES)
def test_talenti_nonnegative_cases(disk128, torsion128, gamma, kind, arg):
    if kind == "annulus":
        g = level_set_integral_opt(disk128, gamma, arg, "max", torsion128)
    elif kind == "disk":
        g = RelaxedSet.from_shape(disk128, arg)
    else:
        g = RelaxedSet(disk128, np.zeros(disk128.count))
    v = solve_indicator(disk128, g, gamma, method="direct")
    rep = talenti_compare(v, gamma, rearrange_set(g, disk128), tol=5e-3)
    assert len(rep.violations) == 0, rep.max_excess


def test_negative_field_rejected(disk128):
    g = RelaxedSet.from_shape(disk128, Disk((0, 0), 0.6))
    v = solve_indicator(disk128, g, 0.5, method="direct")
    assert v.min < -5e-3
    with pytest.raises(NotNonnegative):
        talenti_compare(v, 0.5, rearrange_set(g, disk128))
