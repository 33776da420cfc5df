"""Finite difference form of the C0-Q2 finite element method for
``-div(a grad u) + c u = f`` and tools to certify that its matrices are
monotone (entrywise nonnegative inverse)."""

__version__ = "0.1.0"

from .grid import Grid1D, Grid2D, PointClass, build_grid_1d, build_grid_2d, classify_1d, classify_2d
from .assembly import (
    CoefficientField,
    SparseOperator,
    Splitting,
    assemble,
    assemble_1d_laplacian,
    assemble_1d_variable,
    assemble_2d_laplacian,
    assemble_2d_variable,
    scale_boundary_rows,
    split_operator,
)
from .quadrature import assemble_via_quadrature
from .analysis import (
    ConnectivityGraph,
    InverseReport,
    LorenzReport,
    SingularMatrixError,
    Verdict,
    connects,
    dmp_certify,
    inverse_min_entries,
    is_m_matrix_wcdd,
    is_z_pattern,
    lorenz_check,
)
from .constraints import (
    CellBounds,
    ConstraintReport,
    bounds_from_function,
    bounds_from_samples,
    check_1d_samples,
    check_1d_theorem_variants,
    check_2d_samples,
    check_2d_theorem_variants,
)
from .factorization import FactorPair, factor_1d_laplacian, factor_2d_laplacian, verify_factorization
from .experiments import (
    ExperimentSpec,
    ResultTable,
    convergence_study,
    run_heat_backward_euler,
    run_random_coefficient,
    run_smooth_coefficient,
    sweep_dt_ratio,
)
from .io import read_matrix_market, write_matrix_market
