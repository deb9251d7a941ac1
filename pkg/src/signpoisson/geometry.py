"""Planar shape descriptions and their rasterization onto uniform cell grids.

Every shape is an *open* set: points on the boundary are outside.  Shapes
are frozen dataclasses; the module-level functions :func:`measure`,
:func:`contains` and :func:`rasterize` accept any of them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ConfigError, EmptyRaster

# direction order used for neighbor / fraction arrays: east, west, north, south
DIRECTIONS = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]])


def _as_point(p) -> tuple[float, float]:
    x, y = (float(c) for c in p)
    return (x, y)


def _points(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("points must have a trailing dimension of size 2")
    return arr


@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as_point(self.center))
        if not self.radius > 0:
            raise ConfigError(f"disk radius must be positive, got {self.radius}")

    def measure(self) -> float:
        return math.pi * self.radius**2

    def contains(self, p) -> np.ndarray:
        p = _points(p)
        d2 = (p[..., 0] - self.center[0]) ** 2 + (p[..., 1] - self.center[1]) ** 2
        return d2 < self.radius**2

    def bbox(self):
        cx, cy = self.center
        r = self.radius
        return (cx - r, cy - r, cx + r, cy + r)

    def width(self) -> float:
        return self.radius

    def distance_to_boundary(self, p) -> np.ndarray:
        p = _points(p)
        return np.abs(self.radius - np.hypot(p[..., 0] - self.center[0], p[..., 1] - self.center[1]))

    def reference_point(self):
        return self.center


@dataclass(frozen=True)
class Annulus:
    center: tuple[float, float]
    r_in: float
    r_out: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as_point(self.center))
        if not 0 < self.r_in < self.r_out:
            raise ConfigError(f"annulus needs 0 < r_in < r_out, got {self.r_in}, {self.r_out}")

    def measure(self) -> float:
        return math.pi * (self.r_out**2 - self.r_in**2)

    def contains(self, p) -> np.ndarray:
        p = _points(p)
        d2 = (p[..., 0] - self.center[0]) ** 2 + (p[..., 1] - self.center[1]) ** 2
        return (d2 > self.r_in**2) & (d2 < self.r_out**2)

    def bbox(self):
        cx, cy = self.center
        r = self.r_out
        return (cx - r, cy - r, cx + r, cy + r)

    def width(self) -> float:
        return 0.5 * (self.r_out - self.r_in)

    def distance_to_boundary(self, p) -> np.ndarray:
        p = _points(p)
        r = np.hypot(p[..., 0] - self.center[0], p[..., 1] - self.center[1])
        return np.minimum(np.abs(r - self.r_in), np.abs(self.r_out - r))

    def reference_point(self):
        cx, cy = self.center
        return (cx + 0.5 * (self.r_in + self.r_out), cy)


def _signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if abs(v) < 1e-15 else (1 if v > 0 else -1)

    def on_seg(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    return (
        (o1 == 0 and on_seg(p1, p2, q1))
        or (o2 == 0 and on_seg(p1, p2, q2))
        or (o3 == 0 and on_seg(q1, q2, p1))
        or (o4 == 0 and on_seg(q1, q2, p2))
    )


def _segment_distance(p: np.ndarray, a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ab = b - a
    t = np.clip(((p - a) @ ab) / (ab @ ab), 0.0, 1.0)
    proj = a + t[..., None] * ab
    return np.linalg.norm(p - proj, axis=-1)


@dataclass(frozen=True)
class Polygon:
    """Simple polygon given by its vertex list (either orientation)."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        verts = tuple(_as_point(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        if n < 3:
            raise ConfigError("polygon needs at least 3 vertices")
        if abs(_signed_area(np.array(verts))) <= 1e-14:
            raise ConfigError("polygon has zero area")
        for i in range(n):
            for j in range(i + 1, n):
                # adjacent edges share a vertex by construction
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_cross(verts[i], verts[(i + 1) % n], verts[j], verts[(j + 1) % n]):
                    raise ConfigError(f"polygon edges {i} and {j} intersect")

    @property
    def _array(self) -> np.ndarray:
        return np.array(self.vertices)

    def measure(self) -> float:
        return abs(_signed_area(self._array))

    def perimeter(self) -> float:
        v = self._array
        return float(np.sum(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)))

    def _edges(self):
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def contains(self, p) -> np.ndarray:
        p = _points(p)
        x, y = p[..., 0], p[..., 1]
        inside = np.zeros(x.shape, dtype=bool)
        on_edge = np.zeros(x.shape, dtype=bool)
        for (x1, y1), (x2, y2) in self._edges():
            crosses = (y1 > y) != (y2 > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            inside ^= crosses & (x < xint)
            cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
            within = (
                (x >= min(x1, x2)) & (x <= max(x1, x2)) & (y >= min(y1, y2)) & (y <= max(y1, y2))
            )
            on_edge |= (np.abs(cross) <= 1e-15) & within
        return inside & ~on_edge

    def bbox(self):
        v = self._array
        return (v[:, 0].min(), v[:, 1].min(), v[:, 0].max(), v[:, 1].max())

    def width(self) -> float:
        # 2|P|/perimeter: the inradius for tangential polygons, an upper bound otherwise
        return 2.0 * self.measure() / self.perimeter()

    def distance_to_boundary(self, p) -> np.ndarray:
        p = _points(p)
        return np.min([_segment_distance(p, a, b) for a, b in self._edges()], axis=0)

    def reference_point(self):
        v = self._array
        x, y = v[:, 0], v[:, 1]
        cross = x * np.roll(y, -1) - np.roll(x, -1) * y
        a = 0.5 * cross.sum()
        cx = np.sum((x + np.roll(x, -1)) * cross) / (6 * a)
        cy = np.sum((y + np.roll(y, -1)) * cross) / (6 * a)
        return (float(cx), float(cy))


class Triangle(Polygon):
    def __init__(self, v0, v1, v2):
        object.__setattr__(self, "vertices", (v0, v1, v2))
        self.__post_init__()

    def __post_init__(self):
        verts = tuple(_as_point(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) != 3:
            raise ConfigError("triangle needs exactly 3 vertices")
        if abs(_signed_area(np.array(verts))) <= 1e-14:
            raise ConfigError("triangle vertices are collinear")

    def contains(self, p) -> np.ndarray:
        p = _points(p)
        (x0, y0), (x1, y1), (x2, y2) = self.vertices
        sgn = 1.0 if _signed_area(self._array) > 0 else -1.0

        def side(ax, ay, bx, by):
            return sgn * ((bx - ax) * (p[..., 1] - ay) - (by - ay) * (p[..., 0] - ax))

        return (side(x0, y0, x1, y1) > 0) & (side(x1, y1, x2, y2) > 0) & (side(x2, y2, x0, y0) > 0)

    def __repr__(self):
        return f"Triangle{self.vertices!r}"


@dataclass(frozen=True)
class Sector:
    """Circular sector ``{vertex + r(cos t, sin t): r < radius, |t - t0| < half_angle}``."""

    vertex: tuple[float, float]
    half_angle: float
    radius: float
    bisector: tuple[float, float] = (1.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "vertex", _as_point(self.vertex))
        bx, by = _as_point(self.bisector)
        norm = math.hypot(bx, by)
        if norm == 0:
            raise ConfigError("sector bisector must be nonzero")
        object.__setattr__(self, "bisector", (bx / norm, by / norm))
        if not 0 < self.half_angle < math.pi:
            raise ConfigError(f"sector half-angle must lie in (0, pi), got {self.half_angle}")
        if not self.radius > 0:
            raise ConfigError("sector radius must be positive")

    @property
    def opening(self) -> float:
        return 2.0 * self.half_angle

    def measure(self) -> float:
        return self.half_angle * self.radius**2

    def _polar(self, p):
        p = _points(p)
        dx = p[..., 0] - self.vertex[0]
        dy = p[..., 1] - self.vertex[1]
        bx, by = self.bisector
        # rotate so the bisector is the positive first axis
        u = dx * bx + dy * by
        w = -dx * by + dy * bx
        return np.hypot(u, w), np.arctan2(w, u)

    def contains(self, p) -> np.ndarray:
        r, t = self._polar(p)
        return (r < self.radius) & (np.abs(t) < self.half_angle) & (r > 0)

    def bbox(self):
        vx, vy = self.vertex
        t0 = math.atan2(self.bisector[1], self.bisector[0])
        angles = list(np.linspace(t0 - self.half_angle, t0 + self.half_angle, 9))
        for k in range(-4, 5):
            a = k * math.pi / 2
            if abs(math.remainder(a - t0, 2 * math.pi)) < self.half_angle:
                angles.append(a)
        xs = [vx] + [vx + self.radius * math.cos(a) for a in angles]
        ys = [vy] + [vy + self.radius * math.sin(a) for a in angles]
        return (min(xs), min(ys), max(xs), max(ys))

    def width(self) -> float:
        s = math.sin(min(self.half_angle, math.pi / 2))
        return self.radius * s / (1 + s)

    def distance_to_boundary(self, p) -> np.ndarray:
        p = _points(p)
        r, t = self._polar(p)
        arc = np.abs(self.radius - r)
        dt = np.abs(t)
        # distance to the two edge segments through the vertex
        edge = np.where(
            self.half_angle - dt < math.pi / 2,
            r * np.sin(np.clip(self.half_angle - dt, 0.0, None)),
            r,
        )
        return np.minimum(arc, edge)

    def reference_point(self):
        vx, vy = self.vertex
        return (vx + 0.5 * self.radius * self.bisector[0], vy + 0.5 * self.radius * self.bisector[1])


@dataclass(frozen=True)
class UnionOfDisks:
    disks: tuple[Disk, ...]

    def __post_init__(self):
        disks = tuple(d if isinstance(d, Disk) else Disk(*d) for d in self.disks)
        object.__setattr__(self, "disks", disks)
        if not disks:
            raise ConfigError("union needs at least one disk")
        for i, a in enumerate(disks):
            for b in disks[i + 1 :]:
                if math.dist(a.center, b.center) < a.radius + b.radius:
                    raise ConfigError("union disks must be pairwise disjoint")

    def measure(self) -> float:
        return sum(d.measure() for d in self.disks)

    def contains(self, p) -> np.ndarray:
        return np.logical_or.reduce([d.contains(p) for d in self.disks])

    def bbox(self):
        boxes = np.array([d.bbox() for d in self.disks])
        return (boxes[:, 0].min(), boxes[:, 1].min(), boxes[:, 2].max(), boxes[:, 3].max())

    def width(self) -> float:
        return min(d.radius for d in self.disks)

    def distance_to_boundary(self, p) -> np.ndarray:
        return np.min([d.distance_to_boundary(p) for d in self.disks], axis=0)

    def reference_point(self):
        return max(self.disks, key=lambda d: d.radius).center


DomainSpec = Union[Disk, Annulus, Triangle, Polygon, Sector, UnionOfDisks]


def measure(spec: DomainSpec) -> float:
    """Exact area of ``spec``."""
    return spec.measure()


def contains(spec: DomainSpec, p) -> np.ndarray | bool:
    """Strict membership test; accepts a single point or an ``(..., 2)`` array."""
    res = spec.contains(p)
    return bool(res) if np.ndim(res) == 0 else res


def equilateral_triangle(side: float = 1.0) -> Triangle:
    """Equilateral triangle with one vertex at the origin and a horizontal base."""
    return Triangle((0.0, 0.0), (side, 0.0), (0.5 * side, 0.5 * math.sqrt(3.0) * side))


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Cell-centered raster of a domain.

    Interior cells are numbered ``0..count-1`` in row-major order (``j`` slow,
    ``i`` fast).  ``neighbors[k, d]`` is the index of the neighbor of cell
    ``k`` in direction ``d`` (east, west, north, south) or ``-1`` when that
    neighbor's center lies outside.  ``fractions[k, d]`` is the distance to
    the boundary along ``d`` in units of ``h`` (exactly 1 for interior
    neighbors).
    """

    spec: DomainSpec
    h: float
    origin: tuple[float, float]
    shape: tuple[int, int]  # (ny, nx)
    mask: np.ndarray
    index: np.ndarray
    cells: np.ndarray
    centers: np.ndarray
    neighbors: np.ndarray
    fractions: np.ndarray

    @property
    def count(self) -> int:
        return len(self.centers)

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    @property
    def area(self) -> float:
        return self.count * self.h * self.h

    @property
    def bbox(self):
        x0, y0 = self.origin
        ny, nx = self.shape
        return (x0, y0, x0 + nx * self.h, y0 + ny * self.h)

    @property
    def boundary_cells(self) -> np.ndarray:
        return np.flatnonzero(np.any(self.neighbors < 0, axis=1))

    def nearest_cell(self, point) -> int:
        """Index of the interior cell whose center is closest to ``point``."""
        d2 = np.sum((self.centers - np.asarray(point, dtype=float)) ** 2, axis=1)
        return int(np.argmin(d2))

    def to_image(self, values: np.ndarray, fill: float = np.nan) -> np.ndarray:
        """Scatter per-cell values into a ``(ny, nx)`` array (row 0 = lowest y)."""
        img = np.full(self.shape, fill, dtype=float)
        img[self.cells[:, 0], self.cells[:, 1]] = values
        return img


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def rasterize(spec: DomainSpec, h: float, rtol: float = 1e-10) -> GridDomain:
    """Rasterize ``spec`` on a cell-centered grid of spacing ``h``.

    A cell is interior when its center lies in the open set.  For every
    interior cell whose neighbor center is outside, the crossing of the
    boundary along the joining grid line is located by bisection on the
    membership indicator to relative accuracy ``rtol``.
    """
    if not h > 0:
        raise ConfigError(f"grid size must be positive, got {h}")
    if not h < spec.width():
        raise ConfigError(
            f"grid size h={h} is not smaller than the domain's inradius scale {spec.width():.6g}"
        )
    xmin, ymin, xmax, ymax = spec.bbox()
    nx = int(math.ceil((xmax - xmin) / h - 1e-9)) + 2
    ny = int(math.ceil((ymax - ymin) / h - 1e-9)) + 2
    x0 = 0.5 * (xmin + xmax) - 0.5 * nx * h
    y0 = 0.5 * (ymin + ymax) - 0.5 * ny * h
    xs = x0 + (np.arange(nx) + 0.5) * h
    ys = y0 + (np.arange(ny) + 0.5) * h
    X, Y = np.meshgrid(xs, ys)
    mask = np.asarray(spec.contains(np.stack([X, Y], axis=-1)))
    # the padding ring must stay outside
    mask[0, :] = mask[-1, :] = False
    mask[:, 0] = mask[:, -1] = False
    if not mask.any():
        raise EmptyRaster(f"no cell center of the h={h} grid lies inside {spec!r}")

    index = np.full(mask.shape, -1, dtype=np.int64)
    jj, ii = np.nonzero(mask)
    index[jj, ii] = np.arange(len(jj))
    cells = np.stack([jj, ii], axis=1)
    centers = np.stack([xs[ii], ys[jj]], axis=1)

    neighbors = np.empty((len(jj), 4), dtype=np.int64)
    for d, (di, dj) in enumerate(DIRECTIONS):
        neighbors[:, d] = index[jj + dj, ii + di]

    fractions = np.ones((len(jj), 4))
    cut_k, cut_d = np.nonzero(neighbors < 0)
    if len(cut_k):
        start = centers[cut_k]
        step = DIRECTIONS[cut_d] * h
        lo = np.zeros(len(cut_k))
        hi = np.ones(len(cut_k))
        for _ in range(200):
            if np.all(hi - lo <= rtol * hi):
                break
            mid = 0.5 * (lo + hi)
            inside = spec.contains(start + mid[:, None] * step)
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        fractions[cut_k, cut_d] = np.maximum(0.5 * (lo + hi), 1e-12)

    return GridDomain(
        spec=spec,
        h=float(h),
        origin=(float(x0), float(y0)),
        shape=(ny, nx),
        mask=_frozen(mask),
        index=_frozen(index),
        cells=_frozen(cells),
        centers=_frozen(centers),
        neighbors=_frozen(neighbors),
        fractions=_frozen(fractions),
    )


def indicator(dom: GridDomain, shape: DomainSpec) -> np.ndarray:
    """Cell-center indicator of ``shape`` on the interior cells of ``dom``."""
    return np.asarray(shape.contains(dom.centers), dtype=float)


def polygon_from_points(points: Sequence[Sequence[float]]) -> Polygon:
    return Polygon(tuple(tuple(p) for p in points))
