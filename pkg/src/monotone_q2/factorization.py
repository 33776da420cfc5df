"""Explicit M-matrix factorizations of the discrete Laplacian.

1D: ``L̄_h = M₁ M₂`` with ``M₁`` dimensionless (knot rows ``-1/4, 1, -1/4``)
and all of the ``1/h²`` scaling in ``M₂``. The product is exact on every
row, boundary rows included.

2D: ``L̄_h u = A₂ (A₁ u)`` on interior rows. ``A₁`` is dimensionless and
``A₂`` carries ``1/h²``. The composition reproduces the interior stencils
exactly but not the boundary columns of interior rows: the factors only act
as a factorization on the interior-by-interior block, which is the block
that enters the solve once the Dirichlet values are moved to the right-hand
side. :class:`FactorPair` records which block is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .analysis import Verdict, is_m_matrix_wcdd
from .assembly import SparseOperator, assemble_1d_laplacian, assemble_2d_laplacian
from .grid import Grid1D, Grid2D, PointClass, classify_2d

__all__ = [
    "FactorPair",
    "factor_1d_laplacian",
    "factor_2d_laplacian",
    "laplacian_factorization",
    "verify_factorization",
]


@dataclass(frozen=True)
class FactorPair:
    """``first`` is applied first: the product is ``second @ first``.

    ``exact_block`` lists the indices on which ``second @ first`` is meant to
    equal the target (rows and columns); ``None`` means the whole matrix.
    """

    first: SparseOperator
    second: SparseOperator
    exact_block: np.ndarray | None = None

    def product(self) -> sp.csr_matrix:
        return (self.second.matrix @ self.first.matrix).tocsr()


def _from_rows(N: int, entries: dict[int, dict[int, float]]) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for r, row in entries.items():
        for c, v in row.items():
            rows.append(r)
            cols.append(c)
            vals.append(v)
    A = sp.csr_matrix((vals, (rows, cols)), shape=(N, N))
    A.sum_duplicates()
    A.sort_indices()
    return A


def factor_1d_laplacian(grid: Grid1D, boundary_scaled: bool = False) -> FactorPair:
    """``L̄_h = M₁ M₂``.

    ``M₂`` has rows ``(-1, 2, -1)/h²`` at cell centers and
    ``(-3/2, 3, -3/2)/h²`` at cell ends; ``M₁`` is the identity except at
    cell ends, where it averages the neighboring cell centers with weight
    ``-1/4``. Boundary rows of ``M₂`` match those of ``L̄_h`` (``1`` or
    ``1/h²`` with ``boundary_scaled``).
    """
    N, h2 = grid.size, grid.h**2
    bdry = 1.0 / h2 if boundary_scaled else 1.0
    m1: dict[int, dict[int, float]] = {0: {0: 1.0}, N - 1: {N - 1: 1.0}}
    m2: dict[int, dict[int, float]] = {0: {0: bdry}, N - 1: {N - 1: bdry}}
    for i in range(1, grid.n + 1):
        if i % 2 == 1:
            m1[i] = {i: 1.0}
            m2[i] = {i - 1: -1.0 / h2, i: 2.0 / h2, i + 1: -1.0 / h2}
        else:
            m1[i] = {i - 1: -0.25, i: 1.0, i + 1: -0.25}
            m2[i] = {i - 1: -1.5 / h2, i: 3.0 / h2, i + 1: -1.5 / h2}
    first = SparseOperator(_from_rows(N, m2), grid, boundary_scaled=boundary_scaled)
    second = SparseOperator(_from_rows(N, m1), grid)
    return FactorPair(first, second)


# (di, dj) -> weight for the interior rows of each factor
_A1 = {
    PointClass.KNOT: {(0, 0): 1.0},
    PointClass.CELL_CENTER: {(0, 0): 2.0, (-1, 0): -0.25, (1, 0): -0.25, (0, -1): -0.25, (0, 1): -0.25},
    PointClass.EDGE_CENTER_Y: {(0, 0): 4 / 3, (-1, 0): -1 / 6, (1, 0): -1 / 6},
    PointClass.EDGE_CENTER_X: {(0, 0): 4 / 3, (0, -1): -1 / 6, (0, 1): -1 / 6},
}
_A2 = {
    PointClass.KNOT: {(0, 0): 6.0, (-1, 0): -1.5, (1, 0): -1.5, (0, -1): -1.5, (0, 1): -1.5},
    PointClass.CELL_CENTER: {
        (0, 0): 2.0,
        (-1, 0): -3 / 8, (1, 0): -3 / 8, (0, -1): -3 / 8, (0, 1): -3 / 8,
        (-1, -1): -1 / 8, (1, -1): -1 / 8, (-1, 1): -1 / 8, (1, 1): -1 / 8,
    },
    PointClass.EDGE_CENTER_Y: {
        (0, 0): 15 / 4,
        (-1, 0): -7 / 16, (1, 0): -7 / 16, (0, -1): -1.0, (0, 1): -1.0,
        (-1, -1): -3 / 16, (1, -1): -3 / 16, (-1, 1): -3 / 16, (1, 1): -3 / 16,
        (-1, -2): -1 / 32, (1, -2): -1 / 32, (-1, 2): -1 / 32, (1, 2): -1 / 32,
    },
}  # fmt: skip
_A2[PointClass.EDGE_CENTER_X] = {(dj, di): w for (di, dj), w in _A2[PointClass.EDGE_CENTER_Y].items()}


def factor_2d_laplacian(grid: Grid2D) -> FactorPair:
    """``L̄_h u = A₂ (A₁ u)`` on the interior block.

    Both factors have identity boundary rows. ``A₁`` is a local average that
    leaves knots unchanged; ``A₂`` is a Z-matrix with zero interior row sums.
    """
    N, h2 = grid.size, grid.h**2
    a1: dict[int, dict[int, float]] = {}
    a2: dict[int, dict[int, float]] = {}
    for j in range(grid.ny + 2):
        for i in range(grid.nx + 2):
            k = grid.index(i, j)
            cls = classify_2d(grid, i, j)
            if cls is PointClass.BOUNDARY:
                a1[k] = {k: 1.0}
                a2[k] = {k: 1.0}
                continue
            a1[k] = {grid.index(i + di, j + dj): w for (di, dj), w in _A1[cls].items()}
            a2[k] = {grid.index(i + di, j + dj): w / h2 for (di, dj), w in _A2[cls].items()}
    first = SparseOperator(_from_rows(N, a1), grid)
    second = SparseOperator(_from_rows(N, a2), grid)
    return FactorPair(first, second, exact_block=grid.interior_indices)


def verify_factorization(target, pair: FactorPair, rtol: float = 1e-12) -> tuple[Verdict, float]:
    """Compare ``second @ first`` with ``target`` on the pair's exact block
    and require both factors to be M-matrices.

    Returns the verdict and the residual ``max|product - target| / max|target|``.
    """
    T = target.matrix if isinstance(target, SparseOperator) else sp.csr_matrix(target)
    if T.shape != pair.first.matrix.shape or T.shape != pair.second.matrix.shape:
        raise ValueError(
            f"dimension mismatch: target {T.shape}, factors {pair.first.matrix.shape} "
            f"and {pair.second.matrix.shape}"
        )
    P = pair.product()
    if pair.exact_block is not None:
        idx = np.asarray(pair.exact_block)
        T = T[idx][:, idx]
        P = P[idx][:, idx]
    scale = float(abs(T).max()) or 1.0
    diff = (P - T).tocoo()
    residual = float(np.max(np.abs(diff.data))) / scale if diff.nnz else 0.0
    m_first = is_m_matrix_wcdd(pair.first.matrix)
    m_second = is_m_matrix_wcdd(pair.second.matrix)
    details = {"residual": residual, "first_m_matrix": bool(m_first), "second_m_matrix": bool(m_second)}
    if residual > rtol:
        return Verdict(False, f"product differs from target: residual {residual:.2e}", details=details), residual
    for name, v in (("first", m_first), ("second", m_second)):
        if not v:
            return Verdict(False, f"{name} factor is not an M-matrix: {v.reason}", v.failing, details), residual
    return Verdict(True, f"product matches to {residual:.1e}; both factors are M-matrices", details=details), residual


def laplacian_factorization(grid) -> tuple[SparseOperator, FactorPair]:
    """The Laplacian on ``grid`` together with its factorization."""
    if grid.dim == 1:
        return assemble_1d_laplacian(grid), factor_1d_laplacian(grid)
    return assemble_2d_laplacian(grid), factor_2d_laplacian(grid)
