"""Numerical studies: inverse minima on test families, a time-step sweep for
the backward Euler operator, and a manufactured-solution convergence study.

Meshes are given as finite element cell counts ``(Mx, My)``; the grid then
has ``2M - 1`` interior points per axis. All inverse studies run on the
rectangle ``[0, 1] x [0, 2]`` with boundary rows scaled by ``1/h²`` unless
asked otherwise.
"""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse.linalg as spla

from .analysis import _threads, inverse_min_entries, lorenz_check
from .assembly import CoefficientField, SparseOperator, assemble, scale_boundary_rows
from .constraints import bounds_from_samples, check_2d_samples, check_2d_theorem_variants
from .grid import build_grid_1d, build_grid_2d

__all__ = [
    "STUDY_MESHES",
    "ExperimentSpec",
    "ResultCell",
    "ResultTable",
    "SweepResult",
    "Manufactured",
    "OrderTable",
    "MANUFACTURED",
    "mesh_grid",
    "smooth_coefficient",
    "random_coefficient",
    "heat_coefficient",
    "run_experiment",
    "run_smooth_coefficient",
    "run_random_coefficient",
    "run_heat_backward_euler",
    "sweep_dt_ratio",
    "convergence_study",
]

STUDY_MESHES = ((2, 4), (4, 8), (8, 16), (16, 32))
RECT = (0.0, 1.0, 0.0, 2.0)


def mesh_grid(mesh: tuple[int, int], rect=RECT):
    """Grid for an ``Mx x My`` cell mesh on ``rect``."""
    mx, my = mesh
    if mx < 1 or my < 1:
        raise ValueError(f"mesh must have at least one cell per axis, got {mesh}")
    return build_grid_2d(2 * mx - 1, 2 * my - 1, rect)


def smooth_coefficient(grid, d: float, c: float = 10.0) -> CoefficientField:
    """``a = 1 + d cos(πx) cos(πy)``, constant ``c``."""
    if not 0.0 <= d < 1.0:
        raise ValueError(f"d must lie in [0, 1) to keep a positive, got {d}")
    return CoefficientField.from_functions(grid, lambda x, y: 1 + d * np.cos(np.pi * x) * np.cos(np.pi * y), c)


def random_coefficient(grid, d: float, rng: np.random.Generator) -> CoefficientField:
    """i.i.d. samples ``a ~ U(d, d + 1)`` at every grid point, ``c = 0``."""
    if d <= 0:
        raise ValueError(f"d must be positive, got {d}")
    return CoefficientField(rng.uniform(d, d + 1.0, size=grid.shape), np.zeros(grid.shape))


def heat_coefficient(grid, ratio: float) -> CoefficientField:
    """One backward Euler step with ``Δt = ratio · h²``: ``a = 1``, ``c = 1/Δt``."""
    if ratio <= 0:
        raise ValueError(f"time step ratio must be positive, got {ratio}")
    return CoefficientField.constant(grid, 1.0, 1.0 / (ratio * grid.h**2))


@dataclass(frozen=True)
class ExperimentSpec:
    """One table: an experiment family evaluated on every (mesh, param) pair.

    ``experiment`` is ``"smooth"`` (param ``d``), ``"random"`` (param ``d``,
    needs ``seed``) or ``"heat"`` (param ``Δt / h²``).
    """

    experiment: str
    params: tuple[float, ...]
    meshes: tuple[tuple[int, int], ...] = STUDY_MESHES
    seed: int | None = None
    scale_boundary: bool = True
    lorenz: bool = True

    def __post_init__(self):
        if self.experiment not in ("smooth", "random", "heat"):
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.experiment == "random" and self.seed is None:
            raise ValueError("random experiment needs a seed")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "meshes", tuple(tuple(int(v) for v in m) for m in self.meshes))


@dataclass
class ResultCell:
    mesh: tuple[int, int]
    param: float
    min_bar: float
    min_interior: float
    threshold: float
    sign_bar: str
    sign_interior: str
    verdicts: dict[str, bool]
    seed: int | None
    scale_boundary: bool
    seconds: float


CSV_COLUMNS = ("mesh", "param", "min_bar", "min_interior", "verdicts", "seed", "seconds")


@dataclass
class ResultTable:
    spec: ExperimentSpec
    cells: list[ResultCell] = field(default_factory=list)

    def cell(self, mesh, param) -> ResultCell:
        for c in self.cells:
            if c.mesh == tuple(mesh) and c.param == float(param):
                return c
        raise KeyError((mesh, param))

    def rows(self) -> list[dict]:
        out = []
        for c in self.cells:
            out.append(
                {
                    "mesh": f"{c.mesh[0]}x{c.mesh[1]}",
                    "param": repr(c.param),
                    "min_bar": f"{c.min_bar:.6e}",
                    "min_interior": f"{c.min_interior:.6e}",
                    "verdicts": ";".join(f"{k}={'pass' if v else 'fail'}" for k, v in c.verdicts.items()),
                    "seed": "" if c.seed is None else str(c.seed),
                    "seconds": f"{c.seconds:.3f}",
                }
            )
        return out

    def to_csv(self, path) -> None:
        from .io import write_csv

        write_csv(path, self.rows(), CSV_COLUMNS)

    def format(self) -> str:
        """Plain-text table: one line per (param, mesh)."""
        lines = [f"{'param':>10} {'mesh':>7} {'min Lbar^-1':>12} {'min L^-1':>12}  verdicts"]
        for c in self.cells:
            v = " ".join(f"{k}:{'P' if ok else 'F'}" for k, ok in c.verdicts.items())
            mesh = f"{c.mesh[0]}x{c.mesh[1]}"
            lines.append(f"{c.param:>10.4g} {mesh:>7} {c.min_bar:>12.2e} {c.min_interior:>12.2e}  {v}")
        return "\n".join(lines)


def _coefficient(spec: ExperimentSpec, grid, mesh_index: int, param_index: int, param: float):
    if spec.experiment == "smooth":
        return smooth_coefficient(grid, param)
    if spec.experiment == "heat":
        return heat_coefficient(grid, param)
    # independent, reproducible stream per table cell
    rng = np.random.default_rng([spec.seed, mesh_index, param_index])
    return random_coefficient(grid, param, rng)


def _run_cell(spec: ExperimentSpec, mesh_index: int, param_index: int) -> ResultCell:
    t0 = time.perf_counter()
    mesh = spec.meshes[mesh_index]
    param = spec.params[param_index]
    grid = mesh_grid(mesh)
    coeff = _coefficient(spec, grid, mesh_index, param_index, param)
    op = assemble(grid, coeff)
    if spec.scale_boundary:
        op = scale_boundary_rows(op)
    report = inverse_min_entries(op)
    verdicts = {
        "samples": check_2d_samples(coeff, grid).passed,
        "ratio": check_2d_theorem_variants(coeff, grid, "ratio", bounds_from_samples(coeff, grid)).passed,
    }
    if spec.lorenz:
        verdicts["lorenz"] = lorenz_check(op).passed
    verdicts["inverse"] = report.nonnegative
    return ResultCell(
        mesh=mesh,
        param=param,
        min_bar=report.min_bar,
        min_interior=report.min_interior,
        threshold=report.threshold,
        sign_bar=report.classify(report.min_bar),
        sign_interior=report.classify(report.min_interior),
        verdicts=verdicts,
        seed=spec.seed,
        scale_boundary=spec.scale_boundary,
        seconds=time.perf_counter() - t0,
    )


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> ResultTable:
    """Evaluate every (mesh, param) cell; output order is params outer,
    meshes inner, independent of scheduling."""
    jobs = [(m, p) for p in range(len(spec.params)) for m in range(len(spec.meshes))]
    workers = _threads() if workers is None else max(1, int(workers))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(min(workers, len(jobs))) as pool:
            cells = list(pool.map(lambda job: _run_cell(spec, *job), jobs))
    else:
        cells = [_run_cell(spec, *job) for job in jobs]
    return ResultTable(spec, cells)


def run_smooth_coefficient(d: float | Sequence[float], meshes=STUDY_MESHES, **kw) -> ResultTable:
    ds = (d,) if np.isscalar(d) else tuple(d)
    return run_experiment(ExperimentSpec("smooth", ds, tuple(meshes), **kw))


def run_random_coefficient(d: float | Sequence[float], meshes=STUDY_MESHES, seed: int = 0, **kw) -> ResultTable:
    ds = (d,) if np.isscalar(d) else tuple(d)
    return run_experiment(ExperimentSpec("random", ds, tuple(meshes), seed=seed, **kw))


def run_heat_backward_euler(ratios: float | Sequence[float], meshes=STUDY_MESHES, **kw) -> ResultTable:
    rs = (ratios,) if np.isscalar(ratios) else tuple(ratios)
    return run_experiment(ExperimentSpec("heat", rs, tuple(meshes), **kw))


# --------------------------------------------------------------------------
# Time step sweep
# --------------------------------------------------------------------------


@dataclass
class SweepResult:
    mesh: tuple[int, int]
    ratios: np.ndarray
    min_bar: np.ndarray
    min_interior: np.ndarray
    thresholds: np.ndarray
    sign_change: float | None
    bracket: tuple[float, float] | None

    def to_gnuplot(self, path) -> None:
        """Whitespace-separated columns: ratio, min_bar, min_interior."""
        with open(path, "w") as fh:
            fh.write(f"# mesh {self.mesh[0]}x{self.mesh[1]}; sign change {self.sign_change}\n")
            fh.write("# ratio min_bar min_interior\n")
            for r, b, i in zip(self.ratios, self.min_bar, self.min_interior):
                fh.write(f"{r:.10g} {b:.10e} {i:.10e}\n")


def _heat_minima(grid, ratio: float, scale_boundary: bool = True):
    op = assemble(grid, heat_coefficient(grid, ratio))
    if scale_boundary:
        op = scale_boundary_rows(op)
    return inverse_min_entries(op)


def sweep_dt_ratio(mesh=(16, 32), ratios: Sequence[float] = (), tol: float = 1e-3,
                   scale_boundary: bool = True) -> SweepResult:
    """Inverse minima of the backward Euler operator over ``Δt / h²``.

    The sign change is the ratio above which ``min L̄_h⁻¹`` is within the
    numerical zero: located by bisection to ``tol`` inside the first
    bracket of ``ratios`` where the sign flips from negative.
    """
    ratios = np.asarray(ratios, dtype=float)
    if ratios.size == 0:
        raise ValueError("ratio grid is empty")
    if np.any(np.diff(ratios) <= 0):
        raise ValueError("ratio grid must be strictly increasing")
    if ratios[0] <= 0:
        raise ValueError("ratios must be positive")
    grid = mesh_grid(mesh)

    def run(r):
        return _heat_minima(grid, r, scale_boundary)

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            reports = list(pool.map(run, ratios))
    else:
        reports = [run(r) for r in ratios]
    neg = np.array([not rep.nonnegative for rep in reports])
    change = bracket = None
    flips = np.flatnonzero(neg[:-1] & ~neg[1:])
    if flips.size:
        lo, hi = float(ratios[flips[0]]), float(ratios[flips[0] + 1])
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if run(mid).nonnegative:
                hi = mid
            else:
                lo = mid
        change, bracket = 0.5 * (lo + hi), (lo, hi)
    return SweepResult(
        mesh=tuple(mesh),
        ratios=ratios,
        min_bar=np.array([r.min_bar for r in reports]),
        min_interior=np.array([r.min_interior for r in reports]),
        thresholds=np.array([r.threshold for r in reports]),
        sign_change=change,
        bracket=bracket,
    )


# --------------------------------------------------------------------------
# Convergence study
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Manufactured:
    """Exact solution with coefficients and the matching source term.

    All callables take coordinate arrays (``x`` or ``x, y``).
    """

    name: str
    dim: int
    u: Callable
    a: Callable
    c: Callable
    f: Callable
    domain: tuple[float, ...]


def _const(v):
    return lambda *xs: np.full(np.shape(xs[0]), float(v))


_PI = np.pi

MANUFACTURED = {
    "sine1d": Manufactured(
        "sine1d", 1,
        u=lambda x: np.sin(_PI * x),
        a=_const(1.0), c=_const(0.0),
        f=lambda x: _PI**2 * np.sin(_PI * x),
        domain=(0.0, 1.0),
    ),
    "sine2d": Manufactured(
        "sine2d", 2,
        u=lambda x, y: np.sin(_PI * x) * np.sin(_PI * y),
        a=_const(1.0), c=_const(0.0),
        f=lambda x, y: 2 * _PI**2 * np.sin(_PI * x) * np.sin(_PI * y),
        domain=(0.0, 1.0, 0.0, 1.0),
    ),
    # variable a and c: a = 1 + x y / 2, c = 1 + x
    "sine2d-variable": Manufactured(
        "sine2d-variable", 2,
        u=lambda x, y: np.sin(_PI * x) * np.sin(_PI * y),
        a=lambda x, y: 1 + 0.5 * x * y,
        c=lambda x, y: 1 + x,
        f=lambda x, y: (
            (1 + 0.5 * x * y) * 2 * _PI**2 * np.sin(_PI * x) * np.sin(_PI * y)
            - 0.5 * _PI * (y * np.cos(_PI * x) * np.sin(_PI * y) + x * np.sin(_PI * x) * np.cos(_PI * y))
            + (1 + x) * np.sin(_PI * x) * np.sin(_PI * y)
        ),
        domain=(0.0, 1.0, 0.0, 1.0),
    ),
    # total degree two; reproduced exactly for constant a and any c
    "quadratic": Manufactured(
        "quadratic", 2,
        u=lambda x, y: 1 + x - y + x**2 + x * y + 2 * y**2,
        a=_const(2.0),
        c=lambda x, y: 1 + x + y**2,
        f=lambda x, y: -2.0 * 6.0 + (1 + x + y**2) * (1 + x - y + x**2 + x * y + 2 * y**2),
        domain=(0.0, 1.0, 0.0, 1.0),
    ),
    # 1D: affine a is also reproduced exactly on quadratics
    "quadratic1d": Manufactured(
        "quadratic1d", 1,
        u=lambda x: 1 - x + 3 * x**2,
        a=lambda x: 1 + x,
        c=lambda x: 2 + x,
        f=lambda x: -(1 * (-1 + 6 * x) + (1 + x) * 6) + (2 + x) * (1 - x + 3 * x**2),
        domain=(0.0, 1.0),
    ),
}  # fmt: skip


@dataclass
class OrderTable:
    case: str
    cells: list[int]
    h: list[float]
    errors: list[float]
    orders: list[float]

    def format(self) -> str:
        lines = [f"{'cells':>6} {'h':>10} {'max error':>12} {'order':>7}"]
        for k, (m, h, e) in enumerate(zip(self.cells, self.h, self.errors)):
            o = f"{self.orders[k - 1]:7.3f}" if k else " " * 7
            lines.append(f"{m:>6} {h:>10.4g} {e:>12.4e} {o}")
        return "\n".join(lines)


def solve_manufactured(case: Manufactured, cells: int, scale_boundary: bool = True):
    """Solve on a mesh with ``cells`` elements per unit length; return the
    grid, the discrete solution and the exact nodal values."""
    if case.dim == 1:
        lo, hi = case.domain
        grid = build_grid_1d(2 * int(round(cells * (hi - lo))) - 1, (lo, hi))
        coords = (grid.points,)
    else:
        x0, x1, y0, y1 = case.domain
        grid = build_grid_2d(2 * int(round(cells * (x1 - x0))) - 1, 2 * int(round(cells * (y1 - y0))) - 1,
                             case.domain)
        coords = grid.mesh()
    coeff = CoefficientField.from_functions(grid, case.a, case.c)
    op: SparseOperator = assemble(grid, coeff)
    if scale_boundary:
        op = scale_boundary_rows(op)
    exact = np.asarray(case.u(*coords), dtype=float).ravel(order="F")
    rhs = np.asarray(case.f(*coords), dtype=float).ravel(order="F").copy()
    bdry = grid.boundary_mask
    rhs[bdry] = exact[bdry] * (1.0 / grid.h**2 if scale_boundary else 1.0)
    u = spla.spsolve(op.matrix.tocsc(), rhs)
    return grid, u, exact


def convergence_study(case: str | Manufactured, cells: Sequence[int] = (2, 4, 8, 16)) -> OrderTable:
    """Max-norm errors over all grid points and observed orders
    ``log2(e_h / e_{h/2})`` on successively halved meshes."""
    if isinstance(case, str):
        if case not in MANUFACTURED:
            raise ValueError(f"unknown case {case!r}; choose from {sorted(MANUFACTURED)}")
        case = MANUFACTURED[case]
    errors, hs = [], []
    for m in cells:
        grid, u, exact = solve_manufactured(case, m)
        errors.append(float(np.max(np.abs(u - exact))))
        hs.append(grid.h)
    with np.errstate(divide="ignore", invalid="ignore"):
        orders = [float(np.log2(errors[k] / errors[k + 1])) for k in range(len(errors) - 1)]
    return OrderTable(case.name, list(cells), hs, errors, orders)


def table_to_dict(table: ResultTable) -> dict:
    return {"spec": asdict(table.spec), "cells": [asdict(c) for c in table.cells]}


def default_workers() -> int:
    return int(os.environ.get("MONOTONE_Q2_THREADS", "0") or 0) or _threads()
