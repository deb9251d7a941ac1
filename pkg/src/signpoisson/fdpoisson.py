"""Finite-difference Dirichlet Poisson solver on rasterized planar domains.

The operator is the five-point Laplacian with shortened arms at cells next to
the boundary.  An arm that reaches the boundary at distance ``theta * h``
contributes ``1 / (theta * h**2)`` to the diagonal; arms between two interior
cells contribute the usual ``1 / h**2`` coupling.  Dividing every flux by
``h`` rather than by the mean arm length keeps the matrix symmetric (and an
M-matrix), which discrete Green reciprocity and conjugate gradients rely on,
while the solution stays second-order accurate.
"""
from __future__ import annotations

import math
import time
import weakref
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import NonConvergence
from .geometry import GridDomain


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Per-interior-cell values on a :class:`GridDomain`."""

    dom: GridDomain
    values: np.ndarray
    integral: float = field(init=False)
    min: float = field(init=False)
    argmin: int = field(init=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.dom.count,):
            raise ValueError(
                f"field has {values.shape} values, domain has {self.dom.count} cells"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "integral", float(self.dom.cell_area * math.fsum(values)))
        k = int(np.argmin(values))
        object.__setattr__(self, "min", float(values[k]))
        object.__setattr__(self, "argmin", k)

    @property
    def max(self) -> float:
        return float(self.values.max())

    @property
    def argmin_point(self) -> tuple[float, float]:
        x, y = self.dom.centers[self.argmin]
        return (float(x), float(y))

    def at(self, point) -> float:
        """Value at the cell nearest to ``point``."""
        return float(self.values[self.dom.nearest_cell(point)])

    def __add__(self, other):
        return ScalarField(self.dom, self.values + _values(other))

    def __sub__(self, other):
        return ScalarField(self.dom, self.values - _values(other))

    def __mul__(self, s: float):
        return ScalarField(self.dom, self.values * s)

    __rmul__ = __mul__


def _values(x) -> np.ndarray:
    if isinstance(x, (ScalarField, RelaxedSet)):
        return x.values
    return np.asarray(x, dtype=float)


@dataclass(frozen=True, eq=False)
class RelaxedSet:
    """Cell-wise density ``g`` in [0, 1] of a (possibly relaxed) source set A."""

    dom: GridDomain
    density: np.ndarray

    def __post_init__(self):
        g = np.array(self.density, dtype=float)
        if g.shape != (self.dom.count,):
            raise ValueError("density does not match the domain")
        if np.any(g < 0) or np.any(g > 1):
            raise ValueError("density must lie in [0, 1]")
        g.flags.writeable = False
        object.__setattr__(self, "density", g)

    @property
    def values(self) -> np.ndarray:
        return self.density

    @property
    def mass(self) -> float:
        return float(self.dom.cell_area * math.fsum(self.density))

    @property
    def centroid(self) -> tuple[float, float]:
        w = self.density / self.density.sum()
        x, y = w @ self.dom.centers
        return (float(x), float(y))

    @property
    def fractional_cells(self) -> np.ndarray:
        return np.flatnonzero((self.density > 0) & (self.density < 1))

    @classmethod
    def from_shape(cls, dom: GridDomain, shape) -> "RelaxedSet":
        """Cell-center indicator of ``shape``."""
        return cls(dom, np.asarray(shape.contains(dom.centers), dtype=float))


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    residual: float
    wall_time: float
    method: str = "cg"


class PoissonOperator:
    """Sparse matrix of ``-Laplacian`` on a grid domain, with a lazily built factorization."""

    def __init__(self, dom: GridDomain):
        self.dom = dom
        n = dom.count
        inv_h2 = 1.0 / (dom.h * dom.h)
        nb = dom.neighbors
        inside = nb >= 0
        diag = np.where(inside, 1.0, 1.0 / dom.fractions).sum(axis=1) * inv_h2
        rows = np.repeat(np.arange(n), 4)[inside.ravel()]
        cols = nb.ravel()[inside.ravel()]
        off = sp.csr_matrix((np.full(len(rows), -inv_h2), (rows, cols)), shape=(n, n))
        self.matrix = (off + sp.diags(diag)).tocsr()
        self.diagonal = diag
        self._lu = None

    @property
    def lu(self):
        if self._lu is None:
            self._lu = spla.splu(self.matrix.tocsc(), permc_spec="MMD_AT_PLUS_A")
        return self._lu

    def direct(self, b: np.ndarray) -> np.ndarray:
        return self.lu.solve(np.asarray(b, dtype=float))

    def cg(self, b: np.ndarray, tol: float = 1e-10, maxiter: int | None = None,
           stall_window: int = 500):
        """Jacobi-preconditioned conjugate gradients.

        Returns ``(x, iterations, relative_residual)``.  The CG residual is
        not monotone, so progress is judged on the best residual seen: when it
        fails to halve over ``stall_window`` iterations (the first window is
        exempt) the solve is handed to BiCGStab from the current iterate.
        """
        A = self.matrix
        n = len(b)
        bnorm = np.linalg.norm(b)
        if bnorm == 0.0:
            return np.zeros(n), 0, 0.0
        if maxiter is None:
            maxiter = int(50 * math.sqrt(n)) + 1
        minv = 1.0 / self.diagonal
        x = np.zeros(n)
        r = b.copy()
        z = minv * r
        p = z.copy()
        rz = r @ z
        res = best = 1.0
        checkpoint = math.inf
        for it in range(1, maxiter + 1):
            Ap = A @ p
            alpha = rz / (p @ Ap)
            x += alpha * p
            r -= alpha * Ap
            res = np.linalg.norm(r) / bnorm
            if res <= tol:
                return x, it, res
            best = min(best, res)
            if it % stall_window == 0:
                if best > 0.5 * checkpoint:
                    return self._bicgstab(b, x, tol, maxiter - it, it)
                checkpoint = best
            z = minv * r
            rz_new = r @ z
            p = z + (rz_new / rz) * p
            rz = rz_new
        raise NonConvergence(
            f"CG did not reach relative residual {tol:g} in {maxiter} iterations (at {res:.3g})"
        )

    def _bicgstab(self, b, x0, tol, maxiter, done):
        M = sp.diags(1.0 / self.diagonal)
        count = [0]

        def cb(_):
            count[0] += 1

        x, info = spla.bicgstab(self.matrix, b, x0=x0, rtol=tol, atol=0.0,
                                maxiter=max(maxiter, 1), M=M, callback=cb)
        res = np.linalg.norm(b - self.matrix @ x) / np.linalg.norm(b)
        if info != 0 or res > tol:
            raise NonConvergence(f"BiCGStab fallback stopped at relative residual {res:.3g}")
        return x, done + count[0], res


_operators: "weakref.WeakKeyDictionary[GridDomain, PoissonOperator]" = weakref.WeakKeyDictionary()


def operator_for(dom: GridDomain) -> PoissonOperator:
    """Cached :class:`PoissonOperator` for ``dom``."""
    op = _operators.get(dom)
    if op is None:
        op = PoissonOperator(dom)
        _operators[dom] = op
    return op


def solve(dom: GridDomain, rhs, tol: float = 1e-10, method: str = "cg"):
    """Solve ``-Δv = rhs`` with zero Dirichlet data.

    ``method`` is ``"cg"`` (Jacobi-preconditioned conjugate gradients) or
    ``"direct"`` (sparse LU, factorized once per domain and reused).
    Returns ``(ScalarField, SolveReport)``.
    """
    b = np.array(_values(rhs), dtype=float)
    if b.shape != (dom.count,):
        raise ValueError("right-hand side does not match the domain")
    op = operator_for(dom)
    t0 = time.perf_counter()
    if method == "cg":
        x, its, res = op.cg(b, tol=tol)
    elif method == "direct":
        bnorm = np.linalg.norm(b)
        its = 0
        if bnorm == 0.0:
            x, res = np.zeros_like(b), 0.0
        else:
            x = op.direct(b)
            res = np.linalg.norm(b - op.matrix @ x) / bnorm
            while res > tol and its < 5:
                x += op.direct(b - op.matrix @ x)
                res = np.linalg.norm(b - op.matrix @ x) / bnorm
                its += 1
            if res > tol:
                raise NonConvergence(f"direct solve residual {res:.3g} above {tol:g}")
    else:
        raise ValueError(f"unknown method {method!r}")
    return ScalarField(dom, x), SolveReport(its, float(res), time.perf_counter() - t0, method)


def solve_indicator(dom: GridDomain, g, gamma: float, tol: float = 1e-10,
                    method: str = "cg") -> ScalarField:
    """Solution for the source ``gamma - g`` where ``g`` in [0, 1] is the density of A."""
    g = _values(g)
    if np.any(g < 0) or np.any(g > 1):
        raise ValueError("set density must lie in [0, 1]")
    return solve(dom, gamma - g, tol=tol, method=method)[0]


def torsion_field(dom: GridDomain, tol: float = 1e-10, method: str = "cg") -> ScalarField:
    return solve(dom, np.ones(dom.count), tol=tol, method=method)[0]


def torsion(dom: GridDomain, tol: float = 1e-10, method: str = "cg") -> float:
    """Torsional rigidity, the integral of the torsion function."""
    return torsion_field(dom, tol=tol, method=method).integral


def essinf(field: ScalarField) -> tuple[float, tuple[float, float]]:
    """Grid minimum and the center of the cell attaining it."""
    return field.min, field.argmin_point


def green_column(dom: GridDomain, cell: int, tol: float = 1e-10,
                 method: str = "direct") -> ScalarField:
    """Discrete ``y -> G(x*, y)`` for the pole at interior cell ``cell``.

    The unit point source is spread as ``1/h**2`` over the pole cell so that
    ``h**2 * sum(column * g)`` approximates ``∫ G(x*, y) g(y) dy``.
    """
    if not 0 <= cell < dom.count:
        raise IndexError(f"cell {cell} is not an interior cell")
    b = np.zeros(dom.count)
    b[cell] = 1.0 / dom.cell_area
    return solve(dom, b, tol=tol, method=method)[0]


def lambda_bottom(dom: GridDomain, rtol: float = 1e-10, maxiter: int = 10_000) -> float:
    """Smallest eigenvalue of the discrete Dirichlet Laplacian by inverse power iteration."""
    op = operator_for(dom)
    x = np.ones(dom.count)
    x /= np.linalg.norm(x)
    lam_old = float(x @ (op.matrix @ x))
    for _ in range(maxiter):
        y = op.direct(x)
        x = y / np.linalg.norm(y)
        lam = float(x @ (op.matrix @ x))
        if abs(lam - lam_old) <= rtol * abs(lam):
            return lam
        lam_old = lam
    raise NonConvergence(f"inverse iteration did not converge in {maxiter} steps")
