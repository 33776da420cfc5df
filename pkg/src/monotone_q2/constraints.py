"""Closed-form mesh constraints that imply inverse positivity.

Two families:

* sample checks, evaluated on the coefficient samples themselves. Each one
  compares the two sides of the entrywise condition ``A_a⁺ <= A^z A_d⁻¹ A^s``
  for a single positive entry of the operator, in the limit of a vanishing
  splitting parameter, so "all sample checks pass" is equivalent to the
  existence of an admissible splitting parameter;
* bound checks, which only need per-cell bounds on ``a``, its derivatives and
  ``c``. These are cruder but apply to a coefficient function before it is
  sampled.

All inequalities are strict. A check compares ``big > small`` and reports the
margin ``(big - small) / small`` (``+inf`` when ``small <= 0 < big - small``),
so equality is a failure with margin 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .assembly import CoefficientField

__all__ = [
    "CellBounds",
    "ConstraintReport",
    "bounds_from_samples",
    "bounds_from_function",
    "check_1d_samples",
    "check_2d_samples",
    "check_1d_theorem_variants",
    "check_2d_theorem_variants",
    "VARIANTS_1D",
    "VARIANTS_2D",
]

N_LAMBDA = 100


@dataclass(frozen=True)
class CellBounds:
    """Bounds of the coefficient over each finite element cell.

    Arrays have one entry per cell: shape ``(M,)`` in 1D, ``(Mx, My)`` in 2D.
    ``grad_max`` bounds ``|a'|`` (1D) or ``|grad a|`` (2D), ``second_max``
    bounds ``a''`` from above (1D only; signed, not absolute), ``concave``
    marks cells on which ``a`` is concave. ``approximate`` is set when the
    bounds were estimated by sampling rather than supplied analytically.
    """

    a_min: np.ndarray
    a_max: np.ndarray
    grad_max: np.ndarray | None = None
    second_max: np.ndarray | None = None
    concave: np.ndarray | None = None
    approximate: bool = False

    def __post_init__(self):
        for name in ("a_min", "a_max", "grad_max", "second_max"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, np.asarray(v, dtype=float))
        if self.concave is not None:
            object.__setattr__(self, "concave", np.asarray(self.concave, dtype=bool))
        if self.a_min.shape != self.a_max.shape:
            raise ValueError("a_min and a_max must have the same shape")
        if np.any(self.a_min <= 0):
            raise ValueError("a_min must be positive")
        if np.any(self.a_max < self.a_min):
            raise ValueError("a_max must not be below a_min")

    @property
    def shape(self):
        return self.a_min.shape


@dataclass
class ConstraintReport:
    """Per-location outcome of one family of constraints.

    ``locations`` holds grid indices for sample checks and cell (1D) or edge
    center (2D) indices for bound checks; ``kinds`` names the inequality
    evaluated at each location.
    """

    constraint: str
    locations: np.ndarray
    margins: np.ndarray
    passed_mask: np.ndarray
    kinds: np.ndarray
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(np.all(self.passed_mask))

    def __bool__(self) -> bool:
        return self.passed

    @property
    def worst_margin(self) -> float:
        return float(np.min(self.margins)) if self.margins.size else float("inf")

    @property
    def failing(self) -> list:
        return [tuple(int(v) for v in np.atleast_1d(loc)) for loc in self.locations[~self.passed_mask]]

    def by_kind(self) -> dict[str, tuple[bool, float]]:
        out = {}
        for kind in dict.fromkeys(self.kinds.tolist()):
            sel = self.kinds == kind
            out[kind] = (bool(np.all(self.passed_mask[sel])), float(np.min(self.margins[sel])))
        return out

    def to_dict(self) -> dict:
        return {
            "check": "constraint",
            "constraint": self.constraint,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "n_locations": int(self.margins.size),
            "failing": self.failing[:50],
            "by_kind": {k: {"passed": p, "worst_margin": m} for k, (p, m) in self.by_kind().items()},
            **self.details,
        }


def _compare(big, small) -> tuple[np.ndarray, np.ndarray]:
    """Strict comparison ``big > small`` and its relative margin."""
    big, small = np.broadcast_arrays(np.asarray(big, dtype=float), np.asarray(small, dtype=float))
    passed = big > small
    margin = np.empty(big.shape)
    pos = small > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        margin[pos] = (big[pos] - small[pos]) / small[pos]
    np.copyto(margin, np.where(passed, np.inf, np.where(big == small, 0.0, -np.inf)), where=~pos)
    return margin, passed


def _report(name, parts, details=None) -> ConstraintReport:
    """Collect ``(locations, margins, passed, kind)`` tuples into one report."""
    parts = [p for p in parts if len(p[1])]
    if not parts:
        return ConstraintReport(name, np.empty((0, 1), dtype=int), np.empty(0), np.empty(0, bool),
                                np.empty(0, dtype=object), details or {})
    locs = np.concatenate([np.asarray(p[0]).reshape(len(p[1]), -1) for p in parts])
    margins = np.concatenate([p[1] for p in parts])
    passed = np.concatenate([p[2] for p in parts])
    kinds = np.concatenate([np.full(len(p[1]), p[3], dtype=object) for p in parts])
    return ConstraintReport(name, locs, margins, passed, kinds, details or {})


# --------------------------------------------------------------------------
# Sample checks
# --------------------------------------------------------------------------


def _line_pair(am, a0, ap, extra):
    """Both sides of one sample check along a line through a cell-center
    type point with neighbors ``am, a0, ap``; the positive entry sits
    past ``am``. ``extra`` is the remaining diagonal weight (times h²) in
    units where the center-type line stencil contributes ``am + ap``."""
    g = 3 * am - 4 * a0 + 3 * ap
    big = (3 * am + ap) * (am + 4 * a0 + 9 * ap)
    small = 4 * (am + ap + extra) * g
    return big, small


def check_1d_samples(coeff: CoefficientField, grid) -> ConstraintReport:
    """Sample check at every cell center ``x_k`` of a 1D grid.

    Compares ``(3a_{k-1} + a_{k+1})(a_{k-1} + 4a_k + 9a_{k+1})`` against
    ``4(a_{k-1} + a_{k+1} + h² c_k)(3a_{k-1} - 4a_k + 3a_{k+1})`` and the
    mirrored pair. The first form guards the positive entry in the cell-end
    row ``k + 1`` and is skipped when that row is a boundary row; the mirror
    guards row ``k - 1``. A nonpositive ``3a - 4a + 3a`` means the guarded
    entry is not positive and the check passes trivially.
    """
    a, c, h2 = coeff.a, coeff.c, grid.h**2
    k = np.arange(1, grid.n + 1, 2)
    parts = []
    for kind, sel, sign in (("1d-cell-center", k + 1 <= grid.n, 1), ("1d-cell-center-mirror", k - 1 >= 1, -1)):
        kk = k[sel]
        big, small = _line_pair(a[kk - sign], a[kk], a[kk + sign], h2 * c[kk])
        m, p = _compare(big, small)
        parts.append((kk, m, p, kind))
    return _report("1d-samples", parts)


def check_2d_samples(coeff: CoefficientField, grid) -> ConstraintReport:
    """Sample checks at every cell center and edge center of a 2D grid.

    Cell centers: one inequality per axis and orientation, with the diagonal
    of the cell-center row (four neighbors plus ``h² c``) in the denominator.
    Edge centers: along the axis where the point is of cell-center type,
    with the full five-point weight of the other axis in the denominator.
    Orientations whose guarded row is a boundary row are skipped.
    """
    A, C, h2 = coeff.a, coeff.c, grid.h**2
    nx, ny = grid.nx, grid.ny
    parts = []

    def run(I, J, axis, kind, edge):
        n_ax = nx if axis == 0 else ny
        pos = I if axis == 0 else J

        def s(o, I=I, J=J):
            return A[I + o, J] if axis == 0 else A[I, J + o]

        def t(o, I=I, J=J):
            return A[I, J + o] if axis == 0 else A[I + o, J]

        for suffix, sign, keep in (("", 1, pos + 1 <= n_ax), ("-mirror", -1, pos - 1 >= 1)):
            Ik, Jk = I[keep], J[keep]
            if Ik.size == 0:
                continue

            def s_(o):
                return s(o, Ik, Jk)

            def t_(o):
                return t(o, Ik, Jk)

            am, a0, ap = s_(-sign), s_(0), s_(sign)
            cc = h2 * C[Ik, Jk]
            if edge:
                five = t_(-2) + 4 * t_(-1) + 18 * t_(0) + 4 * t_(1) + t_(2)
                g = 3 * am - 4 * a0 + 3 * ap
                big = 2 * (am + 4 * a0 + 9 * ap) * (3 * am + ap)
                small = (five + 8 * (am + ap) + 8 * cc) * g
            else:
                big, small = _line_pair(am, a0, ap, t_(-1) + t_(1) + cc)
            m, p = _compare(big, small)
            parts.append((np.column_stack([Ik, Jk]), m, p, kind + suffix))

    ii, jj = np.meshgrid(np.arange(1, nx + 1), np.arange(1, ny + 1), indexing="ij")
    ii, jj = ii.ravel(order="F"), jj.ravel(order="F")
    cell = (ii % 2 == 1) & (jj % 2 == 1)
    edge_x = (ii % 2 == 1) & (jj % 2 == 0)  # edge parallel to the x-axis
    edge_y = (ii % 2 == 0) & (jj % 2 == 1)  # edge parallel to the y-axis
    run(ii[cell], jj[cell], 0, "2d-cell-center-x", False)
    run(ii[cell], jj[cell], 1, "2d-cell-center-y", False)
    run(ii[edge_x], jj[edge_x], 0, "2d-edge-x", True)
    run(ii[edge_y], jj[edge_y], 1, "2d-edge-y", True)
    return _report("2d-samples", parts)


# --------------------------------------------------------------------------
# Bounds
# --------------------------------------------------------------------------


def _cell_nodes_1d(grid) -> np.ndarray:
    return 2 * np.arange(grid.n_cells)[:, None] + np.arange(3)[None, :]


def bounds_from_samples(coeff: CoefficientField, grid) -> CellBounds:
    """Min and max of the samples on each cell (no derivative information).

    Enough for the ratio check and the constant-coefficient bullets when the
    coefficient is known only through its samples.
    """
    if grid.dim == 1:
        vals = coeff.a[_cell_nodes_1d(grid)]
        return CellBounds(vals.min(axis=1), vals.max(axis=1))
    mx, my = grid.n_cells
    blocks = np.lib.stride_tricks.sliding_window_view(coeff.a, (3, 3))[::2, ::2]
    assert blocks.shape[:2] == (mx, my)
    return CellBounds(blocks.min(axis=(2, 3)), blocks.max(axis=(2, 3)))


def bounds_from_function(
    grid,
    a: Callable,
    grad: Callable | None = None,
    second: Callable | None = None,
    samples: int = 33,
    safety: float = 1.1,
) -> CellBounds:
    """Estimate cell bounds by dense sampling. Approximate.

    ``a`` is evaluated on ``samples`` points per cell and axis. Derivative
    bounds come from ``grad`` / ``second`` if given (``grad`` returns
    ``|a'|`` in 1D or the pair ``(a_x, a_y)`` in 2D), else from finite
    differences of the dense samples; either way they are multiplied by
    ``safety``. The coefficient range is widened by the same factor applied
    to the observed oscillation. The result is flagged ``approximate``:
    sampling can miss extrema, so certificates built on it are not proofs.
    """
    t = np.linspace(0.0, 1.0, samples)
    width = 2 * grid.h
    if grid.dim == 1:
        lo = grid.domain[0] + width * np.arange(grid.n_cells)
        x = lo[:, None] + width * t[None, :]
        va = np.asarray(a(x), dtype=float) * np.ones_like(x)
        if grad is not None:
            g = np.abs(np.asarray(grad(x), dtype=float) * np.ones_like(x)).max(axis=1)
        else:
            g = np.abs(np.diff(va, axis=1)).max(axis=1) / (width / (samples - 1))
        if second is not None:
            s = (np.asarray(second(x), dtype=float) * np.ones_like(x)).max(axis=1)
        else:
            s = (np.diff(va, 2, axis=1) / (width / (samples - 1)) ** 2).max(axis=1)
        concave = s <= 0
        s = np.where(s > 0, s * safety, s / safety)
        a_min, a_max = va.min(axis=1), va.max(axis=1)
    else:
        mx, my = grid.n_cells
        x0 = grid.domain[0] + width * np.arange(mx)
        y0 = grid.domain[2] + width * np.arange(my)
        X = x0[:, None, None, None] + width * t[None, None, :, None]
        Y = y0[None, :, None, None] + width * t[None, None, None, :]
        X, Y = np.broadcast_arrays(X, Y)
        va = np.asarray(a(X, Y), dtype=float) * np.ones(X.shape)
        if grad is not None:
            gx, gy = grad(X, Y)
            g = np.sqrt(np.asarray(gx) ** 2 + np.asarray(gy) ** 2) * np.ones(X.shape)
            g = g.max(axis=(2, 3))
        else:
            d = width / (samples - 1)
            gx = np.diff(va, axis=2)[:, :, :, :-1] / d
            gy = np.diff(va, axis=3)[:, :, :-1, :] / d
            g = np.sqrt(gx**2 + gy**2).max(axis=(2, 3))
        s = None
        concave = None
        a_min, a_max = va.min(axis=(2, 3)), va.max(axis=(2, 3))
    spread = (a_max - a_min) * (safety - 1.0) / 2
    a_min = np.where(a_min - spread > 0, a_min - spread, a_min)
    return CellBounds(a_min, a_max + spread, g * safety, s, concave, approximate=True)


# --------------------------------------------------------------------------
# Bound checks
# --------------------------------------------------------------------------

VARIANTS_1D = ("lambda", "combined", "gradient", "constant", "any", "curvature", "concave", "curvature-any")
VARIANTS_2D = ("ratio", "lambda", "combined", "gradient", "constant", "any")


def _need(bounds, name, variant):
    v = getattr(bounds, name)
    if v is None:
        raise ValueError(f"variant {variant!r} needs per-cell {name} bounds")
    return v


def _lambda_scan(lo, big_a, small_a, big_b, small_b):
    """Best margin over λ in (lo, 1); ``big_a`` and ``big_b`` take λ."""
    lams = lo + (1 - lo) * np.arange(1, N_LAMBDA + 1) / (N_LAMBDA + 1)
    best_m = np.full(np.shape(small_a), -np.inf)
    best_p = np.zeros(np.shape(small_a), dtype=bool)
    best_l = np.full(np.shape(small_a), np.nan)
    for lam in lams:
        ma, pa = _compare(big_a(lam), small_a)
        mb, pb = _compare(big_b(lam), small_b)
        m = np.minimum(ma, mb)
        p = pa & pb
        better = (p & ~best_p) | ((p == best_p) & (m > best_m))
        best_m = np.where(better, m, best_m)
        best_p = np.where(better, p, best_p)
        best_l = np.where(better, lam, best_l)
    return best_m, best_p, best_l


def _constant_a(bounds) -> float:
    if not (np.all(bounds.a_min == bounds.a_max) and np.ptp(bounds.a_min) == 0):
        raise ValueError("variant 'constant' needs a constant diffusion coefficient")
    return float(bounds.a_min.flat[0])


def check_1d_theorem_variants(coeff: CoefficientField, grid, variant: str = "any",
                              bounds: CellBounds | None = None) -> ConstraintReport:
    """Bound-based checks per finite element cell ``[x_{k-1}, x_{k+1}]``.

    Variants, each a sufficient condition on its own:

    ``lambda``
        for some λ in (3/13, 1) (100-point scan):
        ``h² c_k < 13(1-λ) min a² / (6 max a - 4 min a)`` and
        ``h max|a'| / min a < (√(39λ) - 3) / 6``.
    ``combined``
        ``2h max|a'| + h² c_k (1 - 2 min a / (3 max a)) < 5 min a² / (3 max a)``.
    ``gradient``
        ``c ≡ 0`` and ``h max|a'| / min a < (√39 - 3) / 6``.
    ``constant``
        ``a`` constant and ``h² c_k < 5a``.
    ``any``
        any applicable one of the four above, per cell.
    ``curvature``
        ``h² (3 c_k / 2 + max a'') < 74/45 min(a_{k-1}, a_k, a_{k+1})``.
    ``concave``
        ``a`` concave on the cell and ``h² c_k < 3 min(a_{k-1}, a_k, a_{k+1})``.
    ``curvature-any``
        ``concave`` where the cell is flagged concave, else ``curvature``.
    """
    if variant not in VARIANTS_1D:
        raise ValueError(f"unknown 1D variant {variant!r}; choose from {VARIANTS_1D}")
    bounds = bounds if bounds is not None else coeff.bounds
    if bounds is None:
        raise ValueError("bound checks need per-cell bounds (CoefficientField.bounds or bounds=)")
    if bounds.shape != (grid.n_cells,):
        raise ValueError(f"bounds have shape {bounds.shape}, expected ({grid.n_cells},)")
    h, h2 = grid.h, grid.h**2
    cells = np.arange(grid.n_cells)
    centers = 2 * cells + 1
    hc = h2 * coeff.c[centers]
    lo, hi = bounds.a_min, bounds.a_max
    samples_min = np.min(coeff.a[_cell_nodes_1d(grid)], axis=1)

    def lam():
        g = _need(bounds, "grad_max", "lambda")
        m, p, best = _lambda_scan(
            3 / 13,
            lambda L: 13 * (1 - L) * lo**2 / (6 * hi - 4 * lo),
            hc,
            lambda L: (np.sqrt(39 * L) - 3) / 6,
            h * g / lo,
        )
        return m, p

    def combined():
        g = _need(bounds, "grad_max", "combined")
        return _compare(5 * lo**2 / (3 * hi), 2 * h * g + hc * (1 - 2 * lo / (3 * hi)))

    def gradient():
        if np.any(coeff.c != 0):
            raise ValueError("variant 'gradient' applies only when c ≡ 0")
        g = _need(bounds, "grad_max", "gradient")
        return _compare(np.full(g.shape, (np.sqrt(39) - 3) / 6), h * g / lo)

    def constant():
        a = _constant_a(bounds)
        return _compare(np.full(hc.shape, 5 * a), hc)

    def curvature():
        s = _need(bounds, "second_max", "curvature")
        return _compare(74 / 45 * samples_min, h2 * (1.5 * coeff.c[centers] + s))

    def concave():
        flags = _need(bounds, "concave", "concave")
        m, p = _compare(3 * samples_min, hc)
        return np.where(flags, m, -np.inf), p & flags

    table = {"lambda": lam, "combined": combined, "gradient": gradient, "constant": constant,
             "curvature": curvature, "concave": concave}
    if variant == "any":
        parts = []
        for name in ("lambda", "combined", "gradient", "constant"):
            try:
                parts.append(table[name]())
            except ValueError:
                continue
        if not parts:
            raise ValueError("no bound variant is applicable with the bounds supplied")
        m = np.max([q[0] for q in parts], axis=0)
        p = np.any([q[1] for q in parts], axis=0)
    elif variant == "curvature-any":
        flags = bounds.concave if bounds.concave is not None else np.zeros(cells.shape, bool)
        if np.all(flags):
            m, p = concave()
        else:
            mc, pc = curvature()
            mk, pk = _compare(3 * samples_min, hc)
            m, p = np.where(flags, mk, mc), np.where(flags, pk, pc)
    else:
        m, p = table[variant]()
    return _report(f"1d-bounds-{variant}", [(cells, m, p, f"1d-{variant}")],
                   {"approximate_bounds": bool(bounds.approximate)})


def _edge_regions(grid, bounds: CellBounds, coeff: CoefficientField):
    """Per edge center: grid index, and min a, max a, max |grad a|, max c
    over the two cells sharing the edge."""
    mx, my = grid.n_cells
    out = []
    # edges parallel to the x-axis: (odd i, even interior j), cells (p, q-1) and (p, q)
    p, q = np.meshgrid(np.arange(mx), np.arange(1, my), indexing="ij")
    out.append((2 * p + 1, 2 * q, (p, q - 1), (p, q)))
    # edges parallel to the y-axis: (even interior i, odd j), cells (p-1, q) and (p, q)
    p, q = np.meshgrid(np.arange(1, mx), np.arange(my), indexing="ij")
    out.append((2 * p, 2 * q + 1, (p - 1, q), (p, q)))

    C = coeff.c
    locs, lo, hi, grad, cmax = [], [], [], [], []
    for I, J, c1, c2 in out:
        if I.size == 0:
            continue
        locs.append(np.column_stack([I.ravel(order="F"), J.ravel(order="F")]))
        lo.append(np.minimum(bounds.a_min[c1], bounds.a_min[c2]).ravel(order="F"))
        hi.append(np.maximum(bounds.a_max[c1], bounds.a_max[c2]).ravel(order="F"))
        if bounds.grad_max is not None:
            grad.append(np.maximum(bounds.grad_max[c1], bounds.grad_max[c2]).ravel(order="F"))
        # c over the 5 x 3 (or 3 x 5) node block of the two cells
        Ii, Jj = I.ravel(order="F"), J.ravel(order="F")
        horizontal = bool(np.all(Ii % 2 == 1))
        di, dj = (1, 2) if horizontal else (2, 1)
        block = [C[Ii + x, Jj + y] for x in range(-di, di + 1) for y in range(-dj, dj + 1)]
        cmax.append(np.max(block, axis=0))
    if not locs:
        return np.empty((0, 2), int), *(np.empty(0),) * 2, None, np.empty(0)
    return (
        np.concatenate(locs),
        np.concatenate(lo),
        np.concatenate(hi),
        np.concatenate(grad) if grad else None,
        np.concatenate(cmax),
    )


def check_2d_theorem_variants(coeff: CoefficientField, grid, variant: str = "ratio",
                              bounds: CellBounds | None = None) -> ConstraintReport:
    """Bound-based checks at every edge center, over the two cells ``J``
    sharing that edge. ``c`` is taken as its largest sample on ``J``.

    ``ratio``
        ``61 min a² > 49 max a² + 8 (3 max a - 2 min a) h² c``.
    ``lambda``
        for some λ in (49/61, 1):
        ``h² c < 61(1-λ) min a² / (8 (3 max a - 2 min a))`` and
        ``h max|grad a| / min a < (√(122λ) - 7√2) / 28``.
    ``combined``
        ``(49√2/3) h max|grad a| + 2 h² c (1 - 2 min a / (3 max a)) < min a² / max a``.
    ``gradient``
        ``c ≡ 0`` and ``h max|grad a| / min a < (√122 - 7√2) / 28``.
    ``constant``
        ``a`` constant and ``h² c < 3a/2``.
    ``any``
        any applicable one of ``lambda``, ``combined``, ``gradient``,
        ``constant``, per edge center.
    """
    if variant not in VARIANTS_2D:
        raise ValueError(f"unknown 2D variant {variant!r}; choose from {VARIANTS_2D}")
    bounds = bounds if bounds is not None else coeff.bounds
    if bounds is None:
        raise ValueError("bound checks need per-cell bounds (CoefficientField.bounds or bounds=)")
    if bounds.shape != grid.n_cells:
        raise ValueError(f"bounds have shape {bounds.shape}, expected {grid.n_cells}")
    h, h2 = grid.h, grid.h**2
    locs, lo, hi, grad, cmax = _edge_regions(grid, bounds, coeff)
    hc = h2 * cmax

    def need_grad(name):
        if grad is None:
            raise ValueError(f"variant {name!r} needs per-cell grad_max bounds")
        return grad

    def ratio():
        return _compare(61 * lo**2, 49 * hi**2 + 8 * (3 * hi - 2 * lo) * hc)

    def lam():
        g = need_grad("lambda")
        m, p, _ = _lambda_scan(
            49 / 61,
            lambda L: 61 * (1 - L) * lo**2 / (8 * (3 * hi - 2 * lo)),
            hc,
            lambda L: (np.sqrt(122 * L) - 7 * np.sqrt(2)) / 28,
            h * g / lo,
        )
        return m, p

    def combined():
        g = need_grad("combined")
        return _compare(lo**2 / hi, 49 * np.sqrt(2) / 3 * h * g + 2 * hc * (1 - 2 * lo / (3 * hi)))

    def gradient():
        if np.any(coeff.c != 0):
            raise ValueError("variant 'gradient' applies only when c ≡ 0")
        g = need_grad("gradient")
        return _compare(np.full(g.shape, (np.sqrt(122) - 7 * np.sqrt(2)) / 28), h * g / lo)

    def constant():
        a = _constant_a(bounds)
        return _compare(np.full(hc.shape, 1.5 * a), hc)

    table = {"ratio": ratio, "lambda": lam, "combined": combined, "gradient": gradient, "constant": constant}
    if variant == "any":
        parts = []
        for name in ("lambda", "combined", "gradient", "constant"):
            try:
                parts.append(table[name]())
            except ValueError:
                continue
        if not parts:
            raise ValueError("no bound variant is applicable with the bounds supplied")
        m = np.max([q[0] for q in parts], axis=0)
        p = np.any([q[1] for q in parts], axis=0)
    else:
        m, p = table[variant]()
    return _report(f"2d-bounds-{variant}", [(locs, m, p, f"2d-{variant}")],
                   {"approximate_bounds": bool(bounds.approximate)})
