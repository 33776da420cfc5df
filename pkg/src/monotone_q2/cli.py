"""Command line interface.

Exit codes: 0 success or PASS, 2 a verification FAIL verdict, 1 usage or
runtime error. Every command prints its resolved configuration first.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Sequence

import numpy as np

from . import __version__
from .analysis import dmp_certify, inverse_min_entries, is_m_matrix_wcdd, is_z_pattern, lorenz_check
from .assembly import CoefficientField, SparseOperator, assemble, scale_boundary_rows
from .constraints import (
    CellBounds,
    bounds_from_function,
    bounds_from_samples,
    check_1d_samples,
    check_1d_theorem_variants,
    check_2d_samples,
    check_2d_theorem_variants,
)
from .experiments import (
    MANUFACTURED,
    STUDY_MESHES,
    convergence_study,
    run_experiment,
    ExperimentSpec,
    sweep_dt_ratio,
)
from .factorization import laplacian_factorization, verify_factorization
from .grid import build_grid_1d, build_grid_2d
from .io import read_matrix_market, write_jsonl, write_matrix_market

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2

DEFAULT_PARAMS = {"smooth": "0.5,0.9,0.99", "random": "0.1,1,10", "heat": "1.5,0.5,0.25"}

# constraint families selectable with --which, and their bound variants
WHICH = {
    "samples": None,
    "thm43": ("1d", ("any", "lambda", "combined", "gradient", "constant")),
    "thm44": ("1d", ("curvature-any", "curvature", "concave")),
    "thm46": ("2d", ("ratio",)),
    "thm47": ("2d", ("any", "lambda", "combined", "gradient", "constant")),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# Argument helpers
# --------------------------------------------------------------------------


def parse_mesh(text: str, dim: int) -> tuple[int, ...]:
    """``"M"`` (1D) or ``"MxN"`` (2D) cell counts."""
    parts = text.lower().split("x")
    try:
        cells = tuple(int(p) for p in parts)
    except ValueError:
        raise UsageError(f"mesh must look like 'M' or 'MxN', got {text!r}") from None
    if len(cells) != dim:
        raise UsageError(f"--dim {dim} needs a mesh with {dim} cell count(s), got {text!r}")
    if any(c < 1 for c in cells):
        raise UsageError(f"cell counts must be positive, got {text!r}")
    return cells


def parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected a comma separated list of numbers, got {text!r}") from None


def parse_ratios(text: str) -> np.ndarray:
    """``lo:hi:n`` (inclusive linspace) or a comma separated list."""
    if ":" in text:
        try:
            lo, hi, n = text.split(":")
            return np.linspace(float(lo), float(hi), int(n))
        except ValueError:
            raise UsageError(f"ratios must look like lo:hi:n, got {text!r}") from None
    return np.asarray(parse_floats(text))


def build_grid(dim: int, mesh: tuple[int, ...], domain: list[float] | None):
    if dim == 1:
        interval = domain or [0.0, 1.0]
        if len(interval) != 2:
            raise UsageError("--domain for --dim 1 needs two numbers")
        return build_grid_1d(2 * mesh[0] - 1, interval)
    mx, my = mesh
    rect = domain or [0.0, 1.0, 0.0, my / mx]
    if len(rect) != 4:
        raise UsageError("--domain for --dim 2 needs four numbers x0,x1,y0,y1")
    return build_grid_2d(2 * mx - 1, 2 * my - 1, rect)


def build_coefficient(spec: str, grid) -> tuple[CoefficientField, CellBounds | None]:
    """Coefficient field and, where known, per-cell bounds for it.

    ``const:a,c``, ``smooth:d[,c]`` (``a = 1 + d cos(πx) [cos(πy)]``),
    ``random:d,seed`` (``a ~ U(d, d+1)``, ``c = 0``), ``file:PATH`` (``.npz``
    with arrays ``a`` and ``c`` of the grid's point shape).
    """
    kind, _, rest = spec.partition(":")
    args = rest.split(",") if rest else []
    try:
        if kind == "const":
            a = float(args[0]) if args else 1.0
            c = float(args[1]) if len(args) > 1 else 0.0
            coeff = CoefficientField.constant(grid, a, c)
            shape = (grid.n_cells,) if grid.dim == 1 else grid.n_cells
            bounds = CellBounds(np.full(shape, a), np.full(shape, a), np.zeros(shape), np.zeros(shape),
                                np.ones(shape, dtype=bool))
            return coeff, bounds
        if kind == "smooth":
            d = float(args[0])
            c = float(args[1]) if len(args) > 1 else 10.0
            if not 0 <= d < 1:
                raise UsageError(f"smooth:d needs 0 <= d < 1, got {d}")
            pi = np.pi
            if grid.dim == 1:
                coeff = CoefficientField.from_functions(grid, lambda x: 1 + d * np.cos(pi * x), c)
                bounds = bounds_from_function(
                    grid, lambda x: 1 + d * np.cos(pi * x),
                    grad=lambda x: np.abs(d * pi * np.sin(pi * x)),
                    second=lambda x: -d * pi**2 * np.cos(pi * x),
                )
            else:
                coeff = CoefficientField.from_functions(
                    grid, lambda x, y: 1 + d * np.cos(pi * x) * np.cos(pi * y), c)
                bounds = bounds_from_function(
                    grid, lambda x, y: 1 + d * np.cos(pi * x) * np.cos(pi * y),
                    grad=lambda x, y: (-d * pi * np.sin(pi * x) * np.cos(pi * y),
                                       -d * pi * np.cos(pi * x) * np.sin(pi * y)),
                )
            return coeff, bounds
        if kind == "random":
            d, seed = float(args[0]), int(args[1])
            if d <= 0:
                raise UsageError(f"random:d needs d > 0, got {d}")
            rng = np.random.default_rng(seed)
            coeff = CoefficientField(rng.uniform(d, d + 1, grid.shape), np.zeros(grid.shape))
            return coeff, bounds_from_samples(coeff, grid)
        if kind == "file":
            data = np.load(rest)
            coeff = CoefficientField(data["a"], data["c"])
            if coeff.a.shape != grid.shape:
                raise UsageError(f"{rest}: arrays have shape {coeff.a.shape}, grid needs {grid.shape}")
            return coeff, bounds_from_samples(coeff, grid)
    except (IndexError, ValueError) as exc:
        raise UsageError(f"bad --coef {spec!r}: {exc}") from None
    raise UsageError(f"unknown coefficient kind {kind!r}; use const, smooth, random or file")


def _add_assembly_flags(p: argparse.ArgumentParser, required: bool = True, scale_default: bool = False):
    p.add_argument("--dim", type=int, choices=(1, 2), default=2)
    p.add_argument("--mesh", required=required, help="cell counts: M (1D) or MxN (2D)")
    p.add_argument("--coef", default="const:1,0",
                   help="const:a,c | smooth:d[,c] | random:d,seed | file:PATH.npz")
    p.add_argument("--domain", type=parse_floats, default=None,
                   help="x0,x1 (1D) or x0,x1,y0,y1 (2D); default [0,1] x [0,N/M]")
    p.add_argument("--scale-boundary", action=argparse.BooleanOptionalAction, default=scale_default,
                   help=f"scale boundary rows to 1/h² (default: {'on' if scale_default else 'off'})")


def _assemble_from_args(args):
    mesh = parse_mesh(args.mesh, args.dim)
    grid = build_grid(args.dim, mesh, args.domain)
    coeff, bounds = build_coefficient(args.coef, grid)
    op = assemble(grid, coeff)
    if args.scale_boundary:
        op = scale_boundary_rows(op)
    return grid, coeff, bounds, op


def _print_config(command: str, args, **extra):
    cfg = {k: v for k, v in vars(args).items() if k not in ("func",)}
    cfg.update(extra)
    print("config " + json.dumps({"command": command, **cfg}, default=str, sort_keys=True))


def _report(args, records):
    if getattr(args, "report", None):
        write_jsonl(args.report, records)


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def cmd_assemble(args) -> int:
    _print_config("assemble", args)
    grid, coeff, _, op = _assemble_from_args(args)
    write_matrix_market(op, args.out, comment=f"monotone-q2 {args.coef} mesh {args.mesh} h={grid.h!r}")
    print(f"wrote {op.N} x {op.N} matrix with {op.matrix.nnz} nonzeros to {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.infile and args.mesh:
        raise UsageError("give either --in FILE or assembly flags, not both")
    if not args.infile and not args.mesh:
        raise UsageError("verify needs --in FILE or --mesh")
    _print_config("verify", args)
    if args.infile:
        op: SparseOperator = read_matrix_market(args.infile)
    else:
        _, _, _, op = _assemble_from_args(args)
    wanted = [name for name in ("lorenz", "inverse", "dmp") if getattr(args, name)]
    if not wanted:
        wanted = ["inverse", "dmp"] if op.grid is None else ["lorenz", "inverse", "dmp"]
    if "lorenz" in wanted and op.grid is None:
        raise UsageError("--lorenz needs an assembled operator; files carry no point classes")

    ok = True
    records = []
    z = is_z_pattern(op)
    m = is_m_matrix_wcdd(op) if z else None
    print(f"N = {op.N}, nnz = {op.matrix.nnz}")
    print(f"Z-pattern: {'yes' if z else 'no'} ({z.reason})")
    if m is not None:
        print(f"M-matrix (weak chained diagonal dominance): {'PASS' if m else 'FAIL'} ({m.reason})")
    if "lorenz" in wanted:
        t0 = time.perf_counter()
        rep = lorenz_check(op, epsilon=args.epsilon)
        eps = "A^z = A^s = A_a⁻/2" if rep.halved else f"epsilon = {rep.epsilon:.6g}"
        print(f"Lorenz: {'PASS' if rep else 'FAIL'} ({eps}, {time.perf_counter() - t0:.2f}s)")
        for name in ("cond1", "cond2", "cond3"):
            v = getattr(rep, name)
            print(f"  {name}: {'pass' if v else 'fail'}  {v.reason}")
        ok &= rep.passed
        records.append(rep)
    if "inverse" in wanted or "dmp" in wanted:
        t0 = time.perf_counter()
        inv = inverse_min_entries(op, args.zero_threshold)
        print(f"min entry of full inverse:     {inv.min_bar: .3e} at {inv.argmin_bar} ({inv.classify(inv.min_bar)})")
        print(f"min entry of interior inverse: {inv.min_interior: .3e} at {inv.argmin_interior} "
              f"({inv.classify(inv.min_interior)})")
        print(f"numerical zero threshold {inv.threshold:.2e}; {time.perf_counter() - t0:.2f}s")
        if "inverse" in wanted:
            print(f"inverse nonnegative: {'PASS' if inv.nonnegative else 'FAIL'}")
            ok &= inv.nonnegative
        records.append(inv)
    if "dmp" in wanted:
        v = dmp_certify(op, args.zero_threshold)
        print(f"discrete maximum principle: {'PASS' if v else 'FAIL'} ({v.reason})")
        ok &= v.passed
        records.append({"check": "dmp", **v.to_dict()})
    _report(args, records)
    print("verdict: " + ("PASS" if ok else "FAIL"))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_constraints(args) -> int:
    _print_config("constraints", args)
    grid, coeff, bounds, _ = _assemble_from_args(args)
    if args.which == "samples":
        rep = check_1d_samples(coeff, grid) if grid.dim == 1 else check_2d_samples(coeff, grid)
    else:
        need_dim, variants = WHICH[args.which]
        if f"{grid.dim}d" != need_dim:
            raise UsageError(f"--which {args.which} applies to --dim {need_dim[0]}")
        variant = args.variant or variants[0]
        if variant not in variants:
            raise UsageError(f"--variant for --which {args.which} must be one of {variants}")
        try:
            if grid.dim == 1:
                rep = check_1d_theorem_variants(coeff, grid, variant, bounds)
            else:
                rep = check_2d_theorem_variants(coeff, grid, variant, bounds)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if rep.details.get("approximate_bounds"):
        print("note: coefficient bounds estimated by dense sampling (approximate)")
    print(f"{'inequality':<28} {'verdict':>7} {'worst margin':>13}")
    for kind, (passed, worst) in rep.by_kind().items():
        print(f"{kind:<28} {'pass' if passed else 'FAIL':>7} {worst:>13.4g}")
    if rep.failing:
        print(f"failing locations ({len(rep.failing)}): {rep.failing[:10]}")
    _report(args, [rep])
    print("verdict: " + ("PASS" if rep else "FAIL"))
    return EXIT_OK if rep else EXIT_FAIL


def cmd_factorize(args) -> int:
    _print_config("factorize", args)
    mesh = parse_mesh(args.mesh, args.dim)
    grid = build_grid(args.dim, mesh, args.domain)
    target, pair = laplacian_factorization(grid)
    verdict, residual = verify_factorization(target, pair)
    block = "all rows" if pair.exact_block is None else "interior block"
    print(f"N = {target.N}; compared on {block}")
    print(f"relative residual {residual:.3e}")
    print(f"first factor M-matrix: {verdict.details['first_m_matrix']}; "
          f"second factor M-matrix: {verdict.details['second_m_matrix']}")
    if args.out:
        write_matrix_market(pair.first, f"{args.out}_first.mtx")
        write_matrix_market(pair.second, f"{args.out}_second.mtx")
        print(f"wrote {args.out}_first.mtx and {args.out}_second.mtx")
    print("verdict: " + ("PASS" if verdict else "FAIL"))
    return EXIT_OK if verdict else EXIT_FAIL


def _parse_meshes(text: str) -> tuple[tuple[int, int], ...]:
    return tuple(parse_mesh(m, 2) for m in text.split(",") if m.strip())


def cmd_table(args) -> int:
    params = parse_floats(args.params or DEFAULT_PARAMS[args.id])
    meshes = _parse_meshes(args.meshes) if args.meshes else STUDY_MESHES
    _print_config("table", args, resolved_params=params, resolved_meshes=meshes)
    spec = ExperimentSpec(args.id, tuple(params), meshes, seed=args.seed if args.id == "random" else None,
                          scale_boundary=not args.no_scale_boundary, lorenz=not args.no_lorenz)
    table = run_experiment(spec)
    print(table.format())
    if args.csv:
        table.to_csv(args.csv)
        print(f"wrote {args.csv}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    mesh = parse_mesh(args.mesh, 2)
    ratios = parse_ratios(args.ratios)
    _print_config("sweep", args, resolved_ratios=ratios.tolist())
    res = sweep_dt_ratio(mesh, ratios, tol=args.tol)
    print(f"{'dt/h^2':>10} {'min Lbar^-1':>12} {'min L^-1':>12}")
    for r, b, i in zip(res.ratios, res.min_bar, res.min_interior):
        print(f"{r:>10.4g} {b:>12.3e} {i:>12.3e}")
    if res.sign_change is None:
        print("no sign change of min Lbar^-1 inside the ratio grid")
    else:
        print(f"sign change at dt/h^2 = {res.sign_change:.4f} (bracket {res.bracket[0]:.4f}..{res.bracket[1]:.4f})")
    if args.out:
        res.to_gnuplot(args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_converge(args) -> int:
    cells = [int(v) for v in parse_floats(args.cells)]
    _print_config("converge", args)
    table = convergence_study(args.case, cells)
    print(table.format())
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="monotone-q2", description="Assemble and certify the Q2 finite difference scheme.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("assemble", help="assemble an operator and write it in Matrix Market format")
    _add_assembly_flags(s)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_assemble)

    s = sub.add_parser("verify", help="M-matrix, Lorenz, inverse and maximum principle checks")
    s.add_argument("--in", dest="infile", help="Matrix Market file instead of assembly flags")
    _add_assembly_flags(s, required=False, scale_default=True)
    s.add_argument("--lorenz", action="store_true")
    s.add_argument("--inverse", action="store_true")
    s.add_argument("--dmp", action="store_true")
    s.add_argument("--epsilon", type=float, default=None, help="fixed splitting parameter (default: search)")
    s.add_argument("--zero-threshold", type=float, default=None)
    s.add_argument("--report", help="append JSON-lines reports to this file")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("constraints", help="closed-form mesh constraints")
    _add_assembly_flags(s)
    s.add_argument("--which", choices=tuple(WHICH), default="samples")
    s.add_argument("--variant", default=None, help="bound variant within the chosen family")
    s.add_argument("--report", help="append JSON-lines reports to this file")
    s.set_defaults(func=cmd_constraints)

    s = sub.add_parser("factorize", help="M-matrix factorization of the discrete Laplacian")
    s.add_argument("--dim", type=int, choices=(1, 2), default=1)
    s.add_argument("--mesh", required=True)
    s.add_argument("--domain", type=parse_floats, default=None)
    s.add_argument("--out", help="prefix for Matrix Market files of the two factors")
    s.set_defaults(func=cmd_factorize)

    s = sub.add_parser("table", help="inverse minima over meshes and parameters")
    s.add_argument("--id", choices=("smooth", "random", "heat"), required=True)
    s.add_argument("--params", help="comma separated d values or dt/h^2 ratios")
    s.add_argument("--meshes", help="comma separated MxN cell meshes (default 2x4,4x8,8x16,16x32)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv", help="write the table as CSV")
    s.add_argument("--no-lorenz", action="store_true", help="skip the splitting check per cell")
    s.add_argument("--no-scale-boundary", action="store_true")
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("sweep", help="inverse minima of the backward Euler operator over dt/h^2")
    s.add_argument("--mesh", default="16x32")
    s.add_argument("--ratios", default="0.2:0.5:7", help="lo:hi:n or a comma separated list")
    s.add_argument("--tol", type=float, default=1e-3)
    s.add_argument("--out", help="gnuplot data file")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("converge", help="manufactured solution convergence study")
    s.add_argument("--case", choices=sorted(MANUFACTURED), required=True)
    s.add_argument("--cells", default="2,4,8,16", help="cells per unit length, comma separated")
    s.set_defaults(func=cmd_converge)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
