"""Placement of the negative source set A.

At a fixed point ``x*`` the value ``v(x*) = γ v_Ω(x*) - ∫_A G(x*, y) dy`` is
minimized over sets of mass ``c`` by filling the superlevel set of the Green
column ``G(x*, ·)`` (bathtub principle).  :func:`minimize_essinf` alternates
between locating the grid minimum of the current solution and refilling A
for that point, from several starting points.
"""
from __future__ import annotations

import logging
import math
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import MassInfeasible
from .fdpoisson import RelaxedSet, ScalarField, _values, green_column, solve_indicator, torsion_field
from .geometry import Disk, GridDomain, Polygon

log = logging.getLogger(__name__)

DEFAULT_SEED = 0x5157
#: grid minima at or below minus this count as negative on the unit disk at h = 1/256
NEGATIVE_AT_H256 = 5e-4


def negativity_threshold(dom: GridDomain) -> float:
    """Magnitude below which a grid minimum is treated as zero.

    Equal to ``NEGATIVE_AT_H256`` on the unit disk at h = 1/256, linear in
    ``h`` (the solver's error next to the boundary) and scaled with the
    domain so that similar grids of dilated domains give dilated answers.
    """
    L = math.sqrt(dom.spec.measure() / math.pi)
    return NEGATIVE_AT_H256 * 256.0 * dom.h * L


def bathtub_fill(weight, c: float, dom: GridDomain | None = None) -> RelaxedSet:
    """Fill mass ``c`` into the cells of largest weight.

    Cells are taken in order of decreasing weight, ties by increasing cell
    index; the last cell may be partially filled so the mass is exact.
    """
    if dom is None:
        dom = weight.dom
    w = _values(weight)
    area = dom.area
    if not 0 <= c <= area * (1 + 1e-12):
        raise MassInfeasible(f"mass {c:g} outside [0, {area:g}]")
    n_full = c / dom.cell_area
    order = np.lexsort((np.arange(dom.count), -w))
    g = np.zeros(dom.count)
    k = min(int(math.floor(n_full + 1e-12)), dom.count)
    g[order[:k]] = 1.0
    rest = n_full - k
    if k < dom.count and rest > 1e-12:
        g[order[k]] = min(rest, 1.0)
    return RelaxedSet(dom, g)


def level_set_integral_opt(dom: GridDomain, gamma: float, c: float, direction: str = "max",
                           torsion: ScalarField | None = None) -> RelaxedSet:
    """Set of mass ``c`` extremizing ``∫ v``; since ``∫ v = γT - ∫_A v_Ω`` it is a level set of ``v_Ω``."""
    if torsion is None:
        torsion = torsion_field(dom, method="direct")
    if direction == "max":
        return bathtub_fill(-torsion.values, c, dom)
    if direction == "min":
        return bathtub_fill(torsion.values, c, dom)
    raise ValueError("direction must be 'max' or 'min'")


@dataclass
class Start:
    """Initial condition for one run: a point (A filled for it) or an explicit set."""

    label: str
    point: tuple[float, float] | None = None
    density: np.ndarray | None = None


@dataclass
class OptResult:
    value: float
    best: RelaxedSet
    argmin_point: tuple[float, float]
    history: list[list[float]]
    converged: bool
    solution: ScalarField = field(repr=False)
    labels: list[str] = field(default_factory=list)
    best_start: str = ""

    @property
    def iterations(self) -> int:
        return sum(len(h) for h in self.history)


class _GreenCache:
    def __init__(self, dom: GridDomain, size: int = 48):
        self.dom = dom
        self.size = size
        self._cache: OrderedDict[int, np.ndarray] = OrderedDict()

    def __call__(self, cell: int) -> np.ndarray:
        col = self._cache.get(cell)
        if col is None:
            col = green_column(self.dom, cell, method="direct").values
            self._cache[cell] = col
            if len(self._cache) > self.size:
                self._cache.popitem(last=False)
        else:
            self._cache.move_to_end(cell)
        return col


def _ray_extent(dom: GridDomain, origin, direction) -> float:
    """Distance from ``origin`` to the boundary along ``direction`` (bisection on membership)."""
    spec = dom.spec
    o = np.asarray(origin, dtype=float)
    d = np.asarray(direction, dtype=float)
    x0, y0, x1, y1 = dom.bbox
    hi = math.hypot(x1 - x0, y1 - y0)
    lo = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if spec.contains(o + mid * d):
            lo = mid
        else:
            hi = mid
    return lo


def default_starts(dom: GridDomain, n: int = 12, seed: int = DEFAULT_SEED,
                   c: float | None = None) -> list[Start]:
    """Domain center, 8 axis points at 0.3 and 0.6 of the way to the boundary, random cells.

    Disks additionally get a disk-shaped A tangent-ish to the boundary on the
    positive first axis, and polygons get one start in each corner.
    """
    center = dom.centers[dom.nearest_cell(dom.spec.reference_point())]
    starts = [Start("center", tuple(center))]
    for ax in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        ext = _ray_extent(dom, center, ax)
        for frac in (0.3, 0.6):
            p = center + frac * ext * np.asarray(ax, dtype=float)
            starts.append(Start(f"axis{ax}@{frac}", tuple(p)))
    starts = starts[: max(n, 1)]
    rng = np.random.default_rng(seed)
    n_random = max(n - len(starts), 0)
    for k in rng.choice(dom.count, size=min(n_random, dom.count), replace=False):
        starts.append(Start(f"random{int(k)}", tuple(dom.centers[k])))
    spec = dom.spec
    if isinstance(spec, Disk) and c is not None:
        # off-center disk of mass c at 0.52 R on the first axis
        p = np.asarray(spec.center) + np.array([0.52 * spec.radius, 0.0])
        d2 = np.sum((dom.centers - p) ** 2, axis=1)
        starts.append(Start("offset-disk", None, bathtub_fill(-d2, c, dom).density))
    if isinstance(spec, Polygon):
        for i, v in enumerate(spec.vertices):
            starts.append(Start(f"corner{i}", tuple(dom.centers[dom.nearest_cell(v)])))
    return starts


def _better(a: tuple[float, np.ndarray], b: tuple[float, np.ndarray]) -> bool:
    """Order by value, then lexicographically by density, so merging is order independent."""
    if a[0] != b[0]:
        return a[0] < b[0]
    diff = np.flatnonzero(a[1] != b[1])
    return bool(len(diff)) and a[1][diff[0]] < b[1][diff[0]]


def _run_start(dom, gamma, c, start: Start, greens: _GreenCache, max_iters: int):
    if start.density is not None:
        g = RelaxedSet(dom, start.density)
    else:
        g = bathtub_fill(greens(dom.nearest_cell(start.point)), c, dom)
    hist: list[float] = []
    best = None
    prev_cell = None
    converged = False
    for _ in range(max_iters):
        v = solve_indicator(dom, g, gamma, method="direct")
        hist.append(v.min)
        if best is None or _better((v.min, g.density), (best[1].min, best[0].density)):
            best = (g, v)
        if v.argmin == prev_cell or (len(hist) > 1 and hist[-2] - hist[-1] < 1e-9):
            converged = True
            break
        prev_cell = v.argmin
        g = bathtub_fill(greens(v.argmin), c, dom)
    return best, hist, converged


def minimize_essinf(dom: GridDomain, gamma: float, c: float, starts: int | Sequence[Start] = 12,
                    max_iters: int = 30, seed: int = DEFAULT_SEED,
                    extra_points: Iterable[Sequence[float]] = (), workers: int = 1) -> OptResult:
    """Multi-start alternating minimization of the grid minimum over sets of mass ``c``."""
    if not 0 < c <= dom.area:
        raise MassInfeasible(f"mass {c:g} outside (0, {dom.area:g}]")
    if isinstance(starts, int):
        if starts < 1:
            raise ValueError("need at least one start")
        start_list = default_starts(dom, starts, seed, c)
    else:
        start_list = list(starts)
    start_list += [Start(f"hint{i}", tuple(p)) for i, p in enumerate(extra_points)]
    greens = _GreenCache(dom)

    def run(s):
        return _run_start(dom, gamma, c, s, greens, max_iters)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            outcomes = list(ex.map(run, start_list))
    else:
        outcomes = [run(s) for s in start_list]

    best = None
    best_label = ""
    for s, ((g, v), _, _) in zip(start_list, outcomes):
        if best is None or _better((v.min, g.density), (best[1].min, best[0].density)):
            best = (g, v)
            best_label = s.label
    g, v = best
    log.debug("c=%.6g best essinf %.3e from %s", c, v.min, best_label)
    return OptResult(
        value=v.min,
        best=g,
        argmin_point=v.argmin_point,
        history=[h for _, h, _ in outcomes],
        converged=all(conv for _, _, conv in outcomes),
        solution=v,
        labels=[s.label for s in start_list],
        best_start=best_label,
    )


@dataclass
class CMinusEstimate:
    low: float
    high: float
    evaluations: list[tuple[float, float, bool]]
    threshold: float

    def __iter__(self):
        return iter((self.low, self.high))

    def monotone(self) -> bool:
        """True when every mass found negative exceeds every mass found nonnegative."""
        neg = [c for c, _, is_neg in self.evaluations if is_neg]
        pos = [c for c, _, is_neg in self.evaluations if not is_neg]
        return not neg or not pos or min(neg) > max(pos)


def estimate_c_minus(dom: GridDomain, gamma: float, tol: float = 1e-2,
                     threshold: float | None = None, starts: int = 12, max_iters: int = 30,
                     seed: int = DEFAULT_SEED) -> CMinusEstimate:
    """Bisection on the mass for the sign of the optimized grid minimum.

    The bracket starts at ``(0, γ|Ω|)``.  Because the optimizer only finds
    *some* bad placement, the upper end over-estimates the critical mass.
    """
    if threshold is None:
        threshold = negativity_threshold(dom)
    lo, hi = 0.0, gamma * dom.area
    evaluations = []
    hints: list[tuple[float, float]] = []
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        res = minimize_essinf(dom, gamma, mid, starts=starts, max_iters=max_iters, seed=seed,
                              extra_points=hints)
        negative = res.value <= -threshold
        evaluations.append((mid, res.value, negative))
        log.info("c=%.6f essinf=%.3e negative=%s", mid, res.value, negative)
        if negative:
            hi = mid
            if res.argmin_point not in hints:
                hints.append(res.argmin_point)
        else:
            lo = mid
    return CMinusEstimate(lo, hi, evaluations, threshold)
