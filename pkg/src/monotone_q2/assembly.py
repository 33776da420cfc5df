"""Assembly of the full operator ``L̄_h`` and its ε-splitting.

Each interior row of the variable coefficient scheme is a sum of one line
stencil per axis plus ``c`` on the diagonal. Along an axis the stencil type is
decided by the parity of the point index on that axis:

* odd index (cell-center type), three points::

      [-(3a_{k-1} + a_{k+1}),  4(a_{k-1} + a_{k+1}),  -(a_{k-1} + 3a_{k+1})] / 4h²

* even index (cell-end type), five points::

      [ 3a_{k-2} - 4a_{k-1} + 3a_k,
       -(4a_{k-2} + 12a_k),
        a_{k-2} + 4a_{k-1} + 18a_k + 4a_{k+1} + a_{k+2},
       -(12a_k + 4a_{k+2}),
        3a_{k+2} - 4a_{k+1} + 3a_k ] / 8h²

Boundary rows carry the Dirichlet identity (optionally rescaled to ``1/h²``).
Stencil weights are summed before the single division by ``h²`` so that the
variable scheme with ``a ≡ 1, c ≡ 0`` is bitwise equal to the hard-coded
Laplacian stencils.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

import numpy as np
import scipy.sparse as sp

from .grid import Grid1D, Grid2D, PointClass, classify_2d

if TYPE_CHECKING:
    from .constraints import CellBounds

__all__ = [
    "CoefficientField",
    "SparseOperator",
    "Splitting",
    "assemble_1d_laplacian",
    "assemble_1d_variable",
    "assemble_2d_laplacian",
    "assemble_2d_variable",
    "assemble",
    "scale_boundary_rows",
    "split_operator",
]

Grid = "Grid1D | Grid2D"


@dataclass(frozen=True)
class CoefficientField:
    """Samples of ``a > 0`` and ``c >= 0`` at every grid point.

    Arrays have the grid's point shape: ``(n + 2,)`` in 1D and
    ``(nx + 2, ny + 2)`` (indexed ``[i, j]``) in 2D. ``bounds`` optionally
    carries caller-supplied per-cell bounds used by the sufficient mesh
    conditions.
    """

    a: np.ndarray
    c: np.ndarray
    bounds: CellBounds | None = None

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        c = np.asarray(self.c, dtype=float)
        if a.shape != c.shape:
            raise ValueError(f"a has shape {a.shape} but c has shape {c.shape}")
        if not np.all(np.isfinite(a)) or not np.all(np.isfinite(c)):
            raise ValueError("coefficient samples must be finite")
        if np.any(a <= 0):
            k = np.unravel_index(np.argmin(a), a.shape)
            raise ValueError(f"diffusion coefficient must be positive; a{list(k)} = {a[k]:g}")
        if np.any(c < 0):
            k = np.unravel_index(np.argmin(c), c.shape)
            raise ValueError(f"reaction coefficient must be nonnegative; c{list(k)} = {c[k]:g}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)

    @classmethod
    def constant(cls, grid, a: float = 1.0, c: float = 0.0) -> CoefficientField:
        return cls(np.full(grid.shape, float(a)), np.full(grid.shape, float(c)))

    @classmethod
    def from_functions(cls, grid, a: Callable, c: Callable | float = 0.0, bounds=None):
        """Sample ``a`` and ``c`` (callables of the coordinates) on ``grid``."""
        coords = (grid.points,) if grid.dim == 1 else grid.mesh()
        a_vals = np.broadcast_to(np.asarray(a(*coords), dtype=float), grid.shape).copy()
        if callable(c):
            c_vals = np.broadcast_to(np.asarray(c(*coords), dtype=float), grid.shape).copy()
        else:
            c_vals = np.full(grid.shape, float(c))
        return cls(a_vals, c_vals, bounds)

    def with_bounds(self, bounds) -> CoefficientField:
        return dataclasses.replace(self, bounds=bounds)


@dataclass(frozen=True)
class SparseOperator:
    """Square sparse matrix plus the grid metadata it was assembled on.

    Operators read from files have ``grid = coeff = None``; they can be
    analyzed (Z-pattern, M-matrix, inverse checks) but not split.
    """

    matrix: sp.csr_matrix
    grid: Grid1D | Grid2D | None = None
    coeff: CoefficientField | None = None
    laplacian: bool = False
    boundary_scaled: bool = False

    @property
    def N(self) -> int:
        return self.matrix.shape[0]

    @property
    def h(self) -> float | None:
        return None if self.grid is None else self.grid.h

    @property
    def boundary_mask(self) -> np.ndarray:
        """Boolean mask of Dirichlet rows.

        Without grid metadata a row counts as a boundary row when its only
        nonzero is on the diagonal.
        """
        if self.grid is not None:
            return self.grid.boundary_mask
        A = self.matrix.tocsr()
        counts = np.diff(A.indptr)
        diag = A.diagonal()
        return (counts == 1) & (diag != 0)

    @property
    def interior_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary_mask)

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def __matmul__(self, other):
        return self.matrix @ other


@dataclass(frozen=True)
class Splitting:
    """``L̄_h = A_d + A_a⁺ + A^z + A^s`` for a fixed ``epsilon``.

    ``halved`` marks the constant coefficient 1D Laplacian split
    ``A^z = A^s = A_a⁻ / 2``, for which ``epsilon`` plays no role.
    """

    epsilon: float
    diag: sp.csr_matrix
    pos: sp.csr_matrix
    z: sp.csr_matrix
    s: sp.csr_matrix
    halved: bool = False

    def total(self) -> sp.csr_matrix:
        return (self.diag + self.pos + self.z + self.s).tocsr()


# --------------------------------------------------------------------------
# Line stencil geometry shared by assembly and splitting
# --------------------------------------------------------------------------


@dataclass
class _Line:
    """Interior points of one parity class along one axis."""

    pts: np.ndarray  # flat indices
    stride: int
    samples: dict[int, np.ndarray]  # offset -> a at pts + offset * stride


def _strides(grid) -> list[int]:
    return [1] if grid.dim == 1 else [1, grid.nx + 2]


def _axis_index(grid) -> list[np.ndarray]:
    if grid.dim == 1:
        return [np.arange(grid.size)]
    i, j = np.indices(grid.shape)
    return [i.ravel(order="F"), j.ravel(order="F")]


def _lines(grid, a: np.ndarray) -> list[tuple[_Line, _Line]]:
    """Per axis, the (cell-center type, cell-end type) interior point sets."""
    a_flat = np.asarray(a, dtype=float).ravel(order="F")
    interior = ~grid.boundary_mask
    out = []
    for k, stride in zip(_axis_index(grid), _strides(grid)):
        center = np.flatnonzero(interior & (k % 2 == 1))
        end = np.flatnonzero(interior & (k % 2 == 0))
        out.append(
            (
                _Line(center, stride, {o: a_flat[center + o * stride] for o in (-1, 1)}),
                _Line(end, stride, {o: a_flat[end + o * stride] for o in (-2, -1, 0, 1, 2)}),
            )
        )
    return out


def _guards(end: _Line) -> tuple[np.ndarray, np.ndarray]:
    """``3a_{k-2} - 4a_{k-1} + 3a_k`` and its mirror, per cell-end point."""
    s = end.samples
    return 3 * s[-2] - 4 * s[-1] + 3 * s[0], 3 * s[2] - 4 * s[1] + 3 * s[0]


def _check_shapes(grid, coeff: CoefficientField):
    if coeff.a.shape != grid.shape:
        raise ValueError(f"coefficient samples have shape {coeff.a.shape}, grid needs {grid.shape}")


def _finish(grid, rows, cols, vals, diag_unscaled, c_flat) -> sp.csr_matrix:
    """Divide by h², add c on interior diagonals, put identity on boundary rows."""
    N = grid.size
    h2 = grid.h**2
    interior = ~grid.boundary_mask
    rows = np.concatenate(rows) if rows else np.empty(0, dtype=int)
    cols = np.concatenate(cols) if cols else np.empty(0, dtype=int)
    vals = np.concatenate(vals) / h2 if vals else np.empty(0)
    d = np.ones(N)
    d[interior] = diag_unscaled[interior] / h2 + c_flat[interior]
    all_rows = np.concatenate([rows, np.arange(N)])
    all_cols = np.concatenate([cols, np.arange(N)])
    all_vals = np.concatenate([vals, d])
    A = sp.csr_matrix((all_vals, (all_rows, all_cols)), shape=(N, N))
    A.sum_duplicates()
    A.eliminate_zeros()
    A.sort_indices()
    return A


def _assemble_variable(grid, coeff: CoefficientField) -> sp.csr_matrix:
    _check_shapes(grid, coeff)
    rows, cols, vals = [], [], []
    diag = np.zeros(grid.size)
    for center, end in _lines(grid, coeff.a):
        s = center.stride
        am, ap = center.samples[-1], center.samples[1]
        rows += [center.pts, center.pts]
        cols += [center.pts - s, center.pts + s]
        vals += [-(3 * am + ap) / 4, -(am + 3 * ap) / 4]
        np.add.at(diag, center.pts, am + ap)

        s = end.stride
        e = end.samples
        g_left, g_right = _guards(end)
        rows += [end.pts] * 4
        cols += [end.pts - 2 * s, end.pts - s, end.pts + s, end.pts + 2 * s]
        vals += [
            g_left / 8,
            -(4 * e[-2] + 12 * e[0]) / 8,
            -(12 * e[0] + 4 * e[2]) / 8,
            g_right / 8,
        ]
        np.add.at(diag, end.pts, (e[-2] + 4 * e[-1] + 18 * e[0] + 4 * e[1] + e[2]) / 8)
    return _finish(grid, rows, cols, vals, diag, coeff.c.ravel(order="F"))


# --------------------------------------------------------------------------
# Public assembly routines
# --------------------------------------------------------------------------

_CENTER_1D = {-1: -1.0, 0: 2.0, 1: -1.0}
_END_1D = {-2: 0.25, -1: -2.0, 0: 3.5, 1: -2.0, 2: 0.25}

# (di, dj) -> weight, read off the a ≡ 1 stencil tables (times h²)
_STENCILS_2D = {
    PointClass.CELL_CENTER: {(0, 0): 4.0, (-1, 0): -1.0, (1, 0): -1.0, (0, -1): -1.0, (0, 1): -1.0},
    PointClass.KNOT: {
        (0, 0): 7.0,
        (-2, 0): 0.25, (-1, 0): -2.0, (1, 0): -2.0, (2, 0): 0.25,
        (0, -2): 0.25, (0, -1): -2.0, (0, 1): -2.0, (0, 2): 0.25,
    },
    PointClass.EDGE_CENTER_X: {
        (0, 0): 5.5,
        (-2, 0): 0.25, (-1, 0): -2.0, (1, 0): -2.0, (2, 0): 0.25,
        (0, -1): -1.0, (0, 1): -1.0,
    },
    PointClass.EDGE_CENTER_Y: {
        (0, 0): 5.5,
        (-1, 0): -1.0, (1, 0): -1.0,
        (0, -2): 0.25, (0, -1): -2.0, (0, 1): -2.0, (0, 2): 0.25,
    },
}  # fmt: skip


def assemble_1d_laplacian(grid: Grid1D) -> SparseOperator:
    """``L̄_h`` of the 1D scheme for ``-u''``: (-1, 2, -1)/h² at cell centers,
    (1/4, -2, 7/2, -2, 1/4)/h² at cell ends, identity on the two boundary rows.
    """
    rows, cols, vals = [], [], []
    diag = np.zeros(grid.size)
    for i in range(1, grid.n + 1):
        stencil = _CENTER_1D if i % 2 == 1 else _END_1D
        for off, w in stencil.items():
            if off == 0:
                diag[i] = w
            else:
                rows.append([i])
                cols.append([i + off])
                vals.append([w])
    A = _finish(grid, rows, cols, vals, diag, np.zeros(grid.size))
    return SparseOperator(A, grid, CoefficientField.constant(grid), laplacian=True)


def assemble_1d_variable(grid: Grid1D, coeff: CoefficientField) -> SparseOperator:
    """``L̄_h`` of the 1D scheme for ``-(a u')' + c u``."""
    if grid.dim != 1:
        raise ValueError("assemble_1d_variable needs a Grid1D")
    return SparseOperator(_assemble_variable(grid, coeff), grid, coeff)


def assemble_2d_laplacian(grid: Grid2D) -> SparseOperator:
    rows, cols, vals = [], [], []
    diag = np.zeros(grid.size)
    for j in range(1, grid.ny + 1):
        for i in range(1, grid.nx + 1):
            k = grid.index(i, j)
            for (di, dj), w in _STENCILS_2D[classify_2d(grid, i, j)].items():
                if di == dj == 0:
                    diag[k] = w
                else:
                    rows.append([k])
                    cols.append([grid.index(i + di, j + dj)])
                    vals.append([w])
    A = _finish(grid, rows, cols, vals, diag, np.zeros(grid.size))
    return SparseOperator(A, grid, CoefficientField.constant(grid), laplacian=True)


def assemble_2d_variable(grid: Grid2D, coeff: CoefficientField) -> SparseOperator:
    """``L̄_h`` of the 2D scheme for ``-div(a grad u) + c u``.

    Same stencil footprint as the Laplacian: 5 entries at cell centers,
    7 at edge centers, 9 at knots.
    """
    if grid.dim != 2:
        raise ValueError("assemble_2d_variable needs a Grid2D")
    return SparseOperator(_assemble_variable(grid, coeff), grid, coeff)


def assemble(grid, coeff: CoefficientField | None = None) -> SparseOperator:
    """Dispatch on grid dimension; ``coeff=None`` gives the Laplacian."""
    if coeff is None:
        return assemble_1d_laplacian(grid) if grid.dim == 1 else assemble_2d_laplacian(grid)
    return assemble_1d_variable(grid, coeff) if grid.dim == 1 else assemble_2d_variable(grid, coeff)


def scale_boundary_rows(op: SparseOperator) -> SparseOperator:
    """Replace the Dirichlet rows ``u = g`` by ``u / h² = g / h²``.

    The solution is unchanged if the boundary data is scaled the same way;
    the point is that all nonzeros of the matrix then share one magnitude.
    """
    if op.boundary_scaled:
        raise ValueError("boundary rows are already scaled")
    if op.grid is None:
        raise ValueError("boundary rescaling needs grid metadata (mesh width)")
    A = op.matrix.tolil(copy=True)
    for k in np.flatnonzero(op.grid.boundary_mask):
        A[k, k] = 1.0 / op.grid.h**2
    return dataclasses.replace(op, matrix=A.tocsr(), boundary_scaled=True)


# --------------------------------------------------------------------------
# Splitting
# --------------------------------------------------------------------------


def _csr(N, rows, cols, vals) -> sp.csr_matrix:
    if rows:
        rows, cols, vals = (np.concatenate(x) for x in (rows, cols, vals))
    else:
        rows = cols = np.empty(0, dtype=int)
        vals = np.empty(0)
    A = sp.csr_matrix((vals, (rows, cols)), shape=(N, N))
    A.sum_duplicates()
    A.eliminate_zeros()
    A.sort_indices()
    return A


def _off_diagonal(A: sp.csr_matrix, sign: int) -> sp.csr_matrix:
    coo = A.tocoo()
    keep = (coo.row != coo.col) & (sign * coo.data > 0)
    return _csr(A.shape[0], [coo.row[keep]], [coo.col[keep]], [coo.data[keep]])


def split_operator(op: SparseOperator, epsilon: float) -> Splitting:
    """Split ``op`` into diagonal, positive and two nonpositive parts.

    At cell-center type line stencils, ``A^z`` takes ``epsilon`` of the
    negative neighbors and ``A^s`` the remaining ``1 - epsilon``. At cell-end
    type stencils the positive far-neighbor weight ``g⁺`` is moved from the
    near neighbor into ``A^s`` and everything else negative goes to ``A^z``.
    For the 1D Laplacian the split is ``A^z = A^s = A_a⁻ / 2``.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if op.grid is None or op.coeff is None:
        raise ValueError("splitting needs an operator assembled on a grid (point classes unknown)")
    A = op.matrix.tocsr()
    N = op.N
    diag = sp.diags(A.diagonal()).tocsr()
    pos = _off_diagonal(A, +1)

    if op.laplacian and op.grid.dim == 1:
        half = _off_diagonal(A, -1) * 0.5
        return Splitting(epsilon, diag, pos, half.tocsr(), half.tocsr(), halved=True)

    h2 = op.grid.h**2
    zr, zc, zv = [], [], []
    sr, sc, sv = [], [], []
    for center, end in _lines(op.grid, op.coeff.a):
        s = center.stride
        am, ap = center.samples[-1], center.samples[1]
        left, right = -(3 * am + ap) / 4 / h2, -(am + 3 * ap) / 4 / h2
        for rows_, cols_, vals_, w in ((zr, zc, zv, epsilon), (sr, sc, sv, 1.0 - epsilon)):
            rows_ += [center.pts, center.pts]
            cols_ += [center.pts - s, center.pts + s]
            vals_ += [w * left, w * right]

        s = end.stride
        e = end.samples
        g_left, g_right = _guards(end)
        gl_pos, gr_pos = np.maximum(g_left, 0.0), np.maximum(g_right, 0.0)
        gl_neg, gr_neg = np.maximum(-g_left, 0.0), np.maximum(-g_right, 0.0)
        zr += [end.pts] * 4
        zc += [end.pts - 2 * s, end.pts - s, end.pts + s, end.pts + 2 * s]
        zv += [
            -gl_neg / 8 / h2,
            -(4 * e[-2] + 12 * e[0] - gl_pos) / 8 / h2,
            -(12 * e[0] + 4 * e[2] - gr_pos) / 8 / h2,
            -gr_neg / 8 / h2,
        ]
        sr += [end.pts] * 2
        sc += [end.pts - s, end.pts + s]
        sv += [-gl_pos / 8 / h2, -gr_pos / 8 / h2]
    return Splitting(epsilon, diag, pos, _csr(N, zr, zc, zv), _csr(N, sr, sc, sv))
