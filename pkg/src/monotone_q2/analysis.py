"""Sufficient conditions for inverse positivity, and direct inverse checks.

* :func:`is_z_pattern`, :func:`is_m_matrix_wcdd` certify M-matrices by weak
  chained diagonal dominance.
* :func:`connects` is the directed-path condition between two index sets.
* :func:`lorenz_check` certifies a matrix with some positive off-diagonals as
  a product of two M-matrices via the splitting from :mod:`assembly`.
* :func:`inverse_min_entries` and :func:`dmp_certify` compute the inverse
  column by column from one sparse LU factorization.
"""

from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import SparseOperator, Splitting, split_operator

__all__ = [
    "Verdict",
    "SingularMatrixError",
    "ConnectivityGraph",
    "LorenzReport",
    "InverseReport",
    "is_z_pattern",
    "connects",
    "is_m_matrix_wcdd",
    "lorenz_condition2",
    "lorenz_check",
    "inverse_min_entries",
    "dmp_certify",
]

ROW_SUM_RTOL = 1e-13
PRODUCT_RTOL = 1e-13
INVERSE_CAP = 20_000


class SingularMatrixError(ArithmeticError):
    pass


@dataclass
class Verdict:
    """Outcome of a check: ``passed`` plus the reason and offending indices."""

    passed: bool
    reason: str = ""
    failing: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return bool(self.passed)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def _as_csr(A) -> sp.csr_matrix:
    if isinstance(A, SparseOperator):
        A = A.matrix
    if not sp.issparse(A):
        A = sp.csr_matrix(np.asarray(A, dtype=float))
    A = sp.csr_matrix(A, dtype=float)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got shape {A.shape}")
    A.sum_duplicates()
    return A


def _off_diag(A: sp.csr_matrix) -> sp.coo_matrix:
    coo = A.tocoo()
    keep = (coo.row != coo.col) & (coo.data != 0)
    return sp.coo_matrix((coo.data[keep], (coo.row[keep], coo.col[keep])), shape=A.shape)


# --------------------------------------------------------------------------
# Graphs
# --------------------------------------------------------------------------


class ConnectivityGraph:
    """Directed graph with an edge ``i -> k`` for each off-diagonal nonzero
    ``A[i, k]``."""

    def __init__(self, A):
        A = _as_csr(A)
        off = _off_diag(A)
        self.n = A.shape[0]
        self.adjacency = sp.csr_matrix(
            (np.ones(off.nnz, dtype=bool), (off.row, off.col)), shape=A.shape
        )
        # reverse edges, used to search backwards from target sets
        self._reverse = self.adjacency.T.tocsr()

    @property
    def n_edges(self) -> int:
        return self.adjacency.nnz

    def successors(self, i: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[i] : a.indptr[i + 1]]

    def reaching(self, targets) -> np.ndarray:
        """Boolean mask of vertices with a directed path into ``targets``
        (targets included)."""
        seen = np.zeros(self.n, dtype=bool)
        queue = deque()
        for t in np.atleast_1d(np.asarray(targets, dtype=int)):
            if not seen[t]:
                seen[t] = True
                queue.append(t)
        rev = self._reverse
        while queue:
            k = queue.popleft()
            for i in rev.indices[rev.indptr[k] : rev.indptr[k + 1]]:
                if not seen[i]:
                    seen[i] = True
                    queue.append(i)
        return seen


def connects(pattern, n0, nplus) -> bool:
    """True iff every vertex of ``n0`` has a directed path to some vertex of
    ``nplus``. Empty ``n0`` connects trivially."""
    graph = pattern if isinstance(pattern, ConnectivityGraph) else ConnectivityGraph(pattern)
    n0 = np.asarray(list(n0) if not isinstance(n0, np.ndarray) else n0, dtype=int)
    nplus = np.asarray(list(nplus) if not isinstance(nplus, np.ndarray) else nplus, dtype=int)
    for name, idx in (("n0", n0), ("nplus", nplus)):
        if idx.size and (idx.min() < 0 or idx.max() >= graph.n):
            raise IndexError(f"{name} has indices outside 0..{graph.n - 1}")
    if n0.size == 0:
        return True
    if nplus.size == 0:
        return False
    return bool(np.all(graph.reaching(nplus)[n0]))


# --------------------------------------------------------------------------
# Z-matrix and M-matrix tests
# --------------------------------------------------------------------------


def is_z_pattern(A) -> Verdict:
    A = _as_csr(A)
    off = _off_diag(A)
    bad = off.data > 0
    if np.any(bad):
        where = sorted(zip(off.row[bad].tolist(), off.col[bad].tolist()))
        return Verdict(False, f"{len(where)} positive off-diagonal entries", where[:50])
    return Verdict(True, "all off-diagonal entries are nonpositive")


def _row_scale(A: sp.csr_matrix) -> np.ndarray:
    return np.asarray(abs(A).sum(axis=1)).ravel()


def is_m_matrix_wcdd(A) -> Verdict:
    """Nonsingular M-matrix test by weak chained diagonal dominance.

    Requires a Z-pattern with positive diagonal, nonnegative row sums (to
    ``1e-13`` times the row's absolute sum), and a directed path from every
    row with zero row sum to some row with positive row sum.
    """
    A = _as_csr(A)
    z = is_z_pattern(A)
    if not z:
        return Verdict(False, "not a Z-matrix: " + z.reason, z.failing)
    d = A.diagonal()
    if np.any(d <= 0):
        rows = np.flatnonzero(d <= 0).tolist()
        return Verdict(False, f"{len(rows)} nonpositive diagonal entries", rows[:50])
    sums = np.asarray(A.sum(axis=1)).ravel()
    tol = ROW_SUM_RTOL * _row_scale(A)
    negative = sums < -tol
    if np.any(negative):
        rows = np.flatnonzero(negative).tolist()
        return Verdict(False, f"{len(rows)} rows with negative row sum", rows[:50])
    strict = sums > tol
    if not np.any(strict):
        return Verdict(False, "no row has a positive row sum")
    weak = np.flatnonzero(~strict)
    reach = ConnectivityGraph(A).reaching(np.flatnonzero(strict))
    stuck = weak[~reach[weak]]
    if stuck.size:
        return Verdict(
            False,
            f"{stuck.size} zero-row-sum rows have no path to a strictly dominant row",
            stuck.tolist()[:50],
        )
    return Verdict(True, "weakly chained diagonally dominant Z-matrix")


# --------------------------------------------------------------------------
# Lorenz condition
# --------------------------------------------------------------------------


@dataclass
class LorenzReport:
    cond1: Verdict
    cond2: Verdict
    cond3: Verdict
    epsilon: float | None
    halved: bool = False

    @property
    def passed(self) -> bool:
        return bool(self.cond1 and self.cond2 and self.cond3)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "check": "lorenz",
            "passed": self.passed,
            "epsilon": self.epsilon,
            "halved": self.halved,
            "cond1": self.cond1.to_dict(),
            "cond2": self.cond2.to_dict(),
            "cond3": self.cond3.to_dict(),
        }


def lorenz_condition2(split: Splitting) -> Verdict:
    """Entrywise ``A_a⁺ <= A^z A_d⁻¹ A^s``.

    The margin reported is ``min (product - A_a⁺) / max(A_a⁺)`` over the
    support of ``A_a⁺``; equality gives margin 0 and passes.
    """
    d = split.diag.diagonal()
    if np.any(d <= 0):
        return Verdict(False, "A_d has nonpositive entries", np.flatnonzero(d <= 0).tolist()[:50])
    product = (split.z @ sp.diags(1.0 / d) @ split.s).tocsr()
    pos = split.pos.tocoo()
    if pos.nnz == 0:
        return Verdict(True, "A_a⁺ is empty", details={"worst_margin": float("inf")})
    rhs = np.asarray(product[pos.row, pos.col]).ravel()
    scale = float(np.max(pos.data))
    gap = rhs - pos.data
    tol = PRODUCT_RTOL * scale
    bad = gap < -tol
    worst = int(np.argmin(gap))
    details = {
        "worst_margin": float(gap[worst] / scale),
        "worst_entry": [int(pos.row[worst]), int(pos.col[worst])],
    }
    if np.any(bad):
        where = sorted(zip(pos.row[bad].tolist(), pos.col[bad].tolist()))
        return Verdict(False, f"{len(where)} entries of A_a⁺ exceed A^z A_d⁻¹ A^s", where[:50], details)
    return Verdict(True, "A_a⁺ <= A^z A_d⁻¹ A^s entrywise", details=details)


def _search_epsilon(op: SparseOperator, steps: int = 40) -> tuple[Splitting, Verdict]:
    """Try ε = 1/2, then bisect (0, 1/2) for the largest ε passing cond2.

    Condition 2 only loses slack as ε grows (the cell-center share of A^s is
    ``1 - ε``), so bisection on its verdict is valid.
    """
    split = split_operator(op, 0.5)
    verdict = lorenz_condition2(split)
    if verdict or split.halved:
        return split, verdict
    lo, hi = 0.0, 0.5
    best = None
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        trial = split_operator(op, mid)
        v = lorenz_condition2(trial)
        if v:
            lo, best = mid, (trial, v)
        else:
            hi = mid
    if best is None:
        # report at the smallest ε tried: the most favorable for cond2
        return trial, v
    return best


def lorenz_check(op: SparseOperator, epsilon: float | None = None, epsilon_search: bool = True) -> LorenzReport:
    """Check the three conditions under which ``op`` is a product of two
    M-matrices, hence monotone.

    1. ``A_d + A^z`` is a nonsingular M-matrix.
    2. ``A_a⁺ <= A^z A_d⁻¹ A^s`` entrywise.
    3. Automatic when every interior ``c > 0``. Otherwise ``A^z`` must cover
       the sparsity pattern of ``A_a⁻`` and every row with zero row sum must
       reach, in the graph of ``A^z``, a row with positive row sum.
    """
    if op.grid is None or op.coeff is None:
        raise ValueError("lorenz_check needs an operator assembled on a grid (point classes unknown)")
    if epsilon is not None:
        split = split_operator(op, epsilon)
        cond2 = lorenz_condition2(split)
    elif epsilon_search:
        split, cond2 = _search_epsilon(op)
    else:
        split = split_operator(op, 0.5)
        cond2 = lorenz_condition2(split)

    cond1 = is_m_matrix_wcdd(split.diag + split.z)
    cond3 = _lorenz_condition3(op, split)
    eps = None if split.halved else split.epsilon
    return LorenzReport(cond1, cond2, cond3, eps, split.halved)


def _lorenz_condition3(op: SparseOperator, split: Splitting) -> Verdict:
    interior = op.interior_indices
    c = op.coeff.c.ravel(order="F")
    if np.all(c[interior] > 0):
        return Verdict(True, "c > 0 at every interior point")
    A = op.matrix
    neg = _off_diag(A)
    neg_keys = set(zip(neg.row[neg.data < 0].tolist(), neg.col[neg.data < 0].tolist()))
    z = _off_diag(split.z.tocsr())
    z_keys = set(zip(z.row.tolist(), z.col.tolist()))
    missing = sorted(neg_keys - z_keys)
    if missing:
        return Verdict(False, f"A^z misses {len(missing)} entries of the pattern of A_a⁻", missing[:50])
    sums = op.row_sums()
    tol = ROW_SUM_RTOL * _row_scale(A.tocsr())
    n0 = np.flatnonzero(np.abs(sums) <= tol)
    nplus = np.flatnonzero(sums > tol)
    if connects(ConnectivityGraph(split.z), n0, nplus):
        return Verdict(True, "A^z connects every zero-row-sum row to a positive row sum")
    graph = ConnectivityGraph(split.z)
    reach = graph.reaching(nplus) if nplus.size else np.zeros(op.N, dtype=bool)
    stuck = n0[~reach[n0]]
    return Verdict(False, f"{stuck.size} zero-row-sum rows not connected", stuck.tolist()[:50])


# --------------------------------------------------------------------------
# Inverse checks
# --------------------------------------------------------------------------


@dataclass
class InverseReport:
    min_bar: float
    argmin_bar: tuple[int, int]
    min_interior: float
    argmin_interior: tuple[int, int] | None
    max_abs: float
    threshold: float
    N: int

    @property
    def nonnegative(self) -> bool:
        return self.min_bar >= -self.threshold

    @property
    def interior_nonnegative(self) -> bool:
        return self.min_interior >= -self.threshold

    def classify(self, value: float) -> str:
        """'negative', 'zero' (within the threshold) or 'positive'."""
        if value < -self.threshold:
            return "negative"
        if value <= self.threshold:
            return "zero"
        return "positive"

    def to_dict(self) -> dict:
        d = _jsonable(asdict(self))
        d.update(check="inverse", nonnegative=self.nonnegative)
        return d


def _threads() -> int:
    env = os.environ.get("MONOTONE_Q2_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"MONOTONE_Q2_THREADS must be an integer, got {env!r}") from None
    return min(8, os.cpu_count() or 1)


def inverse_min_entries(
    op,
    zero_threshold: float | None = None,
    cap: int = INVERSE_CAP,
    chunk: int = 512,
    interior: np.ndarray | None = None,
) -> InverseReport:
    """Smallest entries of ``A⁻¹`` and of its interior block.

    The inverse is formed block by block from one LU factorization and never
    stored whole. ``zero_threshold`` defaults to ``1e-12 * max|A⁻¹|``.
    The interior block uses rows and columns of non-boundary points; for
    operators without grid metadata these are the rows with off-diagonals.
    """
    A = _as_csr(op)
    N = A.shape[0]
    if N > cap:
        raise ValueError(f"N = {N} exceeds the inverse computation cap of {cap}")
    if interior is None:
        if isinstance(op, SparseOperator):
            interior = op.interior_indices
        else:
            interior = SparseOperator(A).interior_indices
    is_int = np.zeros(N, dtype=bool)
    is_int[interior] = True

    try:
        with np.errstate(all="ignore"):
            lu = spla.splu(A.tocsc())
    except RuntimeError as exc:
        raise SingularMatrixError(f"matrix is singular: {exc}") from exc
    diag_u = lu.U.diagonal()
    if np.any(diag_u == 0) or not np.all(np.isfinite(diag_u)):
        raise SingularMatrixError("matrix is singular (zero pivot in LU)")

    def block(start: int):
        stop = min(N, start + chunk)
        rhs = np.zeros((N, stop - start))
        rhs[np.arange(start, stop), np.arange(stop - start)] = 1.0
        X = lu.solve(rhs)
        if not np.all(np.isfinite(X)):
            raise SingularMatrixError("non-finite inverse entries: matrix is numerically singular")
        k = int(np.argmin(X))
        r, c = divmod(k, X.shape[1])
        out = {"min": X[r, c], "arg": (r, start + c), "maxabs": float(np.max(np.abs(X)))}
        cols = np.flatnonzero(is_int[start:stop])
        if cols.size and interior.size:
            Xi = X[np.ix_(interior, cols)]
            k = int(np.argmin(Xi))
            r, c = divmod(k, Xi.shape[1])
            out["imin"] = Xi[r, c]
            out["iarg"] = (int(interior[r]), start + int(cols[c]))
        return out

    starts = range(0, N, chunk)
    workers = min(_threads(), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(block, starts))
    else:
        parts = [block(s) for s in starts]

    # merge in column order so ties resolve deterministically
    best = min(parts, key=lambda p: p["min"])
    max_abs = max(p["maxabs"] for p in parts)
    inner = [p for p in parts if "imin" in p]
    ibest = min(inner, key=lambda p: p["imin"]) if inner else None
    thr = 1e-12 * max_abs if zero_threshold is None else float(zero_threshold)
    return InverseReport(
        min_bar=float(best["min"]),
        argmin_bar=tuple(int(x) for x in best["arg"]),
        min_interior=float(ibest["imin"]) if ibest else float("nan"),
        argmin_interior=tuple(int(x) for x in ibest["iarg"]) if ibest else None,
        max_abs=max_abs,
        threshold=thr,
        N=N,
    )


def dmp_certify(op, zero_threshold: float | None = None) -> Verdict:
    """Discrete maximum principle: monotone matrix with nonnegative row sums."""
    A = _as_csr(op)
    report = inverse_min_entries(op, zero_threshold)
    sums = np.asarray(A.sum(axis=1)).ravel()
    tol = ROW_SUM_RTOL * _row_scale(A)
    bad_rows = np.flatnonzero(sums < -tol)
    details = {"min_bar": report.min_bar, "argmin_bar": list(report.argmin_bar), "threshold": report.threshold}
    if not report.nonnegative:
        return Verdict(False, f"inverse has entry {report.min_bar:.3e} below -{report.threshold:.1e}",
                       [list(report.argmin_bar)], details)
    if bad_rows.size:
        return Verdict(False, f"{bad_rows.size} rows with negative row sum", bad_rows.tolist()[:50], details)
    return Verdict(True, "monotone with nonnegative row sums", details=details)
