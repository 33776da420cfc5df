import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from hypothesis import given
from hypothesis import strategies as st

from monotone_q2.assembly import (
    CoefficientField,
    SparseOperator,
    assemble,
    assemble_1d_laplacian,
    assemble_1d_variable,
    assemble_2d_laplacian,
    assemble_2d_variable,
    scale_boundary_rows,
    split_operator,
)
from monotone_q2.grid import build_grid_1d, build_grid_2d
from monotone_q2.quadrature import assemble_via_quadrature, gauss_lobatto_3, lagrange_tables

# h² L̄_h for n = 7, boundary rows written as h² · 1
Q, T = 0.25, 3.5
PRINTED_MATRIX = np.array([
    [1 / 64, 0, 0, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0, 0],
    [Q, -2, T, -2, Q, 0, 0, 0, 0],
    [0, 0, -1, 2, -1, 0, 0, 0, 0],
    [0, 0, Q, -2, T, -2, Q, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, Q, -2, T, -2, Q],
    [0, 0, 0, 0, 0, 0, -1, 2, -1],
    [0, 0, 0, 0, 0, 0, 0, 0, 1 / 64],
])  # fmt: skip


def random_field(grid, rng, lo=0.5, hi=2.0, c_hi=5.0):
    return CoefficientField(rng.uniform(lo, hi, grid.shape), rng.uniform(0, c_hi, grid.shape))


def grid_2d(nx, ny):
    return build_grid_2d(nx, ny, (0, 1, 0, (ny + 1) / (nx + 1)))


# ---------------------------------------------------------------- 1D


def test_1d_laplacian_matches_printed_matrix():
    g = build_grid_1d(7)
    np.testing.assert_array_equal(assemble_1d_laplacian(g).toarray() * g.h**2, PRINTED_MATRIX)


def test_1d_laplacian_single_cell():
    A = assemble_1d_laplacian(build_grid_1d(1)).toarray()
    np.testing.assert_array_equal(A, [[1, 0, 0], [-4, 8, -4], [0, 0, 1]])


@pytest.mark.parametrize("n", [1, 3, 7, 15])
def test_1d_laplacian_constant_nullity(n):
    g = build_grid_1d(n)
    out = assemble_1d_laplacian(g) @ np.ones(g.size)
    expected = np.zeros(g.size)
    expected[[0, -1]] = 1
    np.testing.assert_allclose(out, expected, atol=1e-12)


@pytest.mark.parametrize("n", [1, 7, 31])
def test_1d_variable_reduces_bitwise(n):
    g = build_grid_1d(n)
    L = assemble_1d_laplacian(g).matrix
    V = assemble_1d_variable(g, CoefficientField.constant(g)).matrix
    assert np.array_equal(L.indptr, V.indptr)
    assert np.array_equal(L.indices, V.indices)
    assert np.array_equal(L.data, V.data)


def test_1d_reaction_shifts_diagonal():
    g = build_grid_1d(7)
    diff = (assemble_1d_variable(g, CoefficientField.constant(g, 1.0, 10.0)).matrix
            - assemble_1d_laplacian(g).matrix).toarray()
    expected = np.diag(np.r_[0, np.full(7, 10.0), 0])
    np.testing.assert_allclose(diff, expected, atol=1e-12)


def test_1d_affine_a_matches_quadrature():
    g = build_grid_1d(3)
    coeff = CoefficientField.from_functions(g, lambda x: 1 + x)
    A = assemble_1d_variable(g, coeff).toarray()
    B = assemble_via_quadrature(g, coeff).toarray()
    np.testing.assert_allclose(A, B, rtol=1e-12, atol=1e-12 * np.abs(A).max())


def test_1d_variable_rows_written_out():
    # cell center and cell end rows against the stencil formulas
    a = np.array([1.0, 2.0, 3.0, 5.0, 7.0])
    g = build_grid_1d(3)
    A = assemble_1d_variable(g, CoefficientField(a, np.zeros(5))).toarray() * g.h**2
    np.testing.assert_allclose(A[1, :3], [-(3 * 1 + 3) / 4, 4 * (1 + 3) / 4, -(1 + 3 * 3) / 4])
    np.testing.assert_allclose(
        A[2],
        [(3 * 1 - 4 * 2 + 3 * 3) / 8, -(4 * 1 + 12 * 3) / 8, (1 + 4 * 2 + 18 * 3 + 4 * 5 + 7) / 8,
         -(12 * 3 + 4 * 7) / 8, (3 * 7 - 4 * 5 + 3 * 3) / 8],
    )


# ---------------------------------------------------------------- 2D


def _row(op, grid, i, j):
    k = grid.index(i, j)
    row = op.matrix.getrow(k).tocoo()
    out = {}
    for col, v in zip(row.col, row.data):
        ci, cj = grid.unravel(col)
        out[(ci - i, cj - j)] = v * grid.h**2
    return out


def test_2d_knot_stencil():
    g = build_grid_2d(7, 7)
    row = _row(assemble_2d_laplacian(g), g, 4, 4)
    expected = {(0, 0): 7.0}
    for s in (-1, 1):
        expected.update({(s, 0): -2.0, (0, s): -2.0, (2 * s, 0): 0.25, (0, 2 * s): 0.25})
    assert row == expected


@pytest.mark.parametrize("i, j", [(2, 3), (3, 2)])
def test_2d_edge_center_stencil(i, j):
    g = build_grid_2d(7, 7)
    row = _row(assemble_2d_laplacian(g), g, i, j)
    assert row[(0, 0)] == 5.5
    assert len(row) == 7
    five = (1, 0) if i % 2 == 0 else (0, 1)
    assert row[(2 * five[0], 2 * five[1])] == 0.25
    assert row[(-five[0], -five[1])] == -2.0


def test_2d_cell_center_stencil():
    g = build_grid_2d(7, 7)
    assert _row(assemble_2d_laplacian(g), g, 3, 5) == {
        (0, 0): 4.0, (1, 0): -1.0, (-1, 0): -1.0, (0, 1): -1.0, (0, -1): -1.0
    }


@pytest.mark.parametrize("nx, ny", [(1, 1), (3, 3), (7, 15)])
def test_2d_laplacian_constant_nullity(nx, ny):
    g = grid_2d(nx, ny)
    np.testing.assert_allclose(assemble_2d_laplacian(g) @ np.ones(g.size), g.boundary_mask.astype(float),
                               atol=1e-10)


@pytest.mark.parametrize("nx, ny", [(1, 1), (7, 7), (7, 15)])
def test_2d_variable_reduces_bitwise(nx, ny):
    g = grid_2d(nx, ny)
    L = assemble_2d_laplacian(g).matrix
    V = assemble_2d_variable(g, CoefficientField.constant(g)).matrix
    assert np.array_equal(L.indptr, V.indptr)
    assert np.array_equal(L.indices, V.indices)
    assert np.array_equal(L.data, V.data)


def test_2d_reaction_shifts_diagonal():
    g = build_grid_2d(7, 7)
    diff = (assemble_2d_variable(g, CoefficientField.constant(g, 1.0, 10.0)).matrix
            - assemble_2d_laplacian(g).matrix)
    np.testing.assert_allclose(diff.diagonal(), 10.0 * ~g.boundary_mask, atol=1e-10)
    assert abs(diff - sp.diags(diff.diagonal())).max() < 1e-10


def test_2d_smooth_coefficient_matches_quadrature():
    g = build_grid_2d(7, 15, (0, 1, 0, 2))
    coeff = CoefficientField.from_functions(g, lambda x, y: 1 + 0.5 * np.cos(np.pi * x) * np.cos(np.pi * y))
    A = assemble_2d_variable(g, coeff).toarray()
    B = assemble_via_quadrature(g, coeff).toarray()
    assert np.abs(A - B).max() <= 1e-12 * np.abs(A).max()


def test_row_entry_counts(rng):
    for g, cap in ((build_grid_1d(15), 5), (grid_2d(9, 11), 9)):
        op = assemble(g, random_field(g, rng))
        assert np.diff(op.matrix.indptr).max() <= cap


# ---------------------------------------------------------------- quadrature oracle


def test_lagrange_tables():
    B, D = lagrange_tables(gauss_lobatto_3()[0])
    np.testing.assert_array_equal(B, np.eye(3))
    np.testing.assert_allclose(D, [[-1.5, 2, -0.5], [-0.5, 0, 0.5], [0.5, -2, 1.5]])


def test_quadrature_1d_laplacian():
    g = build_grid_1d(3)
    A = assemble_1d_laplacian(g).toarray()
    B = assemble_via_quadrature(g, CoefficientField.constant(g)).toarray()
    np.testing.assert_allclose(B, A, atol=1e-13 * np.abs(A).max())
    assert B[2, 2] * g.h**2 == pytest.approx(3.5)


def test_quadrature_2d_laplacian():
    g = build_grid_2d(3, 3)
    A = assemble_2d_laplacian(g).toarray()
    B = assemble_via_quadrature(g, CoefficientField.constant(g)).toarray()
    np.testing.assert_allclose(B, A, atol=1e-13 * np.abs(A).max())


def test_quadrature_random_1d_n7(rng):
    g = build_grid_1d(7)
    coeff = random_field(g, rng)
    A = assemble_1d_variable(g, coeff).toarray()
    B = assemble_via_quadrature(g, coeff).toarray()
    assert np.abs(A - B).max() <= 1e-12 * np.abs(A).max()


@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 3, 7, 15]))
def test_quadrature_oracle_1d(seed, n):
    g = build_grid_1d(n)
    coeff = random_field(g, np.random.default_rng(seed), lo=0.01, hi=100.0)
    A = assemble(g, coeff).toarray()
    assert np.abs(A - assemble_via_quadrature(g, coeff).toarray()).max() <= 1e-12 * np.abs(A).max()


@given(st.integers(0, 2**32 - 1), st.sampled_from([(1, 1), (3, 7), (7, 15), (15, 31)]))
def test_quadrature_oracle_2d(seed, shape):
    g = grid_2d(*shape)
    coeff = random_field(g, np.random.default_rng(seed), lo=0.01, hi=100.0)
    A = assemble(g, coeff).toarray()
    assert np.abs(A - assemble_via_quadrature(g, coeff).toarray()).max() <= 1e-12 * np.abs(A).max()


# ---------------------------------------------------------------- invariants


@given(st.integers(0, 2**32 - 1), st.booleans())
def test_row_sums_equal_c(seed, two_d):
    rng = np.random.default_rng(seed)
    g = grid_2d(5, 7) if two_d else build_grid_1d(9)
    coeff = random_field(g, rng)
    op = assemble(g, coeff)
    sums = op.row_sums()
    inner = ~g.boundary_mask
    c = coeff.c.ravel(order="F")
    scale = np.abs(op.matrix).sum(axis=1).A.ravel()
    assert np.all(np.abs(sums[inner] - c[inner]) <= 1e-13 * scale[inner])
    np.testing.assert_array_equal(sums[~inner], 1.0)
    scaled = scale_boundary_rows(op).row_sums()
    np.testing.assert_allclose(scaled[~inner], 1 / g.h**2)


@pytest.mark.parametrize("grid", [build_grid_1d(9), build_grid_2d(5, 5)], ids=["1d", "2d"])
def test_constant_a_is_symmetric_in_mass_weighted_form(grid):
    # L̄_h = M⁻¹ S with a diagonal M, so M L̄_h is symmetric on the interior block
    op = assemble(grid, CoefficientField.constant(grid, 3.0, 2.0))
    w = np.array([1.0, 2.0])  # lumped mass: knots 2h/3, cell centers 4h/3
    if grid.dim == 1:
        m = w[np.arange(grid.size) % 2]
    else:
        i, j = np.indices(grid.shape)
        m = (w[i % 2] * w[j % 2]).ravel(order="F")
    idx = grid.interior_indices
    S = (sp.diags(m) @ op.matrix).toarray()[np.ix_(idx, idx)]
    np.testing.assert_allclose(S, S.T, atol=1e-12 * np.abs(S).max())


# ---------------------------------------------------------------- validation


@pytest.mark.parametrize("a, c, msg", [(0.0, 0.0, "positive"), (-1.0, 0.0, "positive"), (1.0, -0.5, "nonnegative")])
def test_coefficient_validation(a, c, msg):
    g = build_grid_1d(3)
    with pytest.raises(ValueError, match=msg):
        CoefficientField.constant(g, a, c)


def test_coefficient_shape_mismatch():
    g = build_grid_2d(3, 3)
    with pytest.raises(ValueError, match="shape"):
        assemble_2d_variable(g, CoefficientField.constant(build_grid_2d(5, 5)))
    with pytest.raises(ValueError, match="shape"):
        CoefficientField(np.ones(3), np.ones(4))


def test_coefficient_nonfinite():
    with pytest.raises(ValueError, match="finite"):
        CoefficientField(np.array([1.0, np.nan]), np.zeros(2))


# ---------------------------------------------------------------- boundary scaling


def test_scale_boundary_single_cell():
    op = scale_boundary_rows(assemble_1d_laplacian(build_grid_1d(1)))
    assert op.boundary_scaled
    np.testing.assert_array_equal(op.matrix.diagonal()[[0, 2]], [4.0, 4.0])


def test_scale_boundary_twice_rejected():
    op = scale_boundary_rows(assemble_1d_laplacian(build_grid_1d(3)))
    with pytest.raises(ValueError, match="already scaled"):
        scale_boundary_rows(op)


def test_scale_boundary_needs_grid():
    with pytest.raises(ValueError, match="grid"):
        scale_boundary_rows(SparseOperator(sp.identity(3, format="csr")))


@given(st.integers(0, 2**32 - 1))
def test_scaling_leaves_solution_unchanged(seed):
    rng = np.random.default_rng(seed)
    g = grid_2d(7, 9)
    op = assemble(g, random_field(g, rng))
    f = rng.standard_normal(g.size)
    u = spla.spsolve(op.matrix.tocsc(), f)
    f_scaled = f.copy()
    f_scaled[g.boundary_mask] /= g.h**2
    v = spla.spsolve(scale_boundary_rows(op).matrix.tocsc(), f_scaled)
    np.testing.assert_allclose(u, v, rtol=1e-12, atol=1e-12 * np.abs(u).max())


# ---------------------------------------------------------------- splitting


def test_split_1d_laplacian_halves_negatives():
    g = build_grid_1d(7)
    op = assemble_1d_laplacian(g)
    s = split_operator(op, 0.3)
    assert s.halved
    neg = op.toarray().copy()
    np.fill_diagonal(neg, 0)
    neg[neg > 0] = 0
    np.testing.assert_array_equal(s.z.toarray(), neg / 2)
    np.testing.assert_array_equal(s.s.toarray(), neg / 2)


def test_split_1d_variable_cell_center_row():
    g = build_grid_1d(7)
    a = np.linspace(1, 3, 9) ** 2
    op = assemble_1d_variable(g, CoefficientField(a, np.zeros(9)))
    eps = 0.2
    s = split_operator(op, eps)
    i = 3
    assert s.z[i, i - 1] == pytest.approx(eps * -(3 * a[i - 1] + a[i + 1]) / (4 * g.h**2), rel=1e-15)
    assert s.s[i, i + 1] == pytest.approx((1 - eps) * -(a[i - 1] + 3 * a[i + 1]) / (4 * g.h**2), rel=1e-15)


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.1, 1.5])
def test_split_rejects_epsilon(eps):
    with pytest.raises(ValueError, match="epsilon"):
        split_operator(assemble_1d_laplacian(build_grid_1d(3)), eps)


def test_split_rejects_operator_without_grid():
    with pytest.raises(ValueError, match="grid"):
        split_operator(SparseOperator(sp.identity(3, format="csr")), 0.5)


@given(st.integers(0, 2**32 - 1), st.floats(0.01, 0.99), st.sampled_from(["1d", "2d", "2d-lap"]),
       st.floats(0.05, 3.0))
def test_split_reconstructs_operator(seed, eps, kind, lo):
    rng = np.random.default_rng(seed)
    if kind == "1d":
        g = build_grid_1d(11)
        op = assemble(g, random_field(g, rng, lo=lo, hi=lo + 1))
    elif kind == "2d":
        g = grid_2d(7, 9)
        op = assemble(g, random_field(g, rng, lo=lo, hi=lo + 1))
    else:
        g = grid_2d(7, 9)
        op = assemble_2d_laplacian(g)
    s = split_operator(op, eps)
    diff = abs(s.total() - op.matrix)
    assert (diff.max() if diff.nnz else 0.0) <= 1e-14 * abs(op.matrix).max()
    pos, z, ss = s.pos.toarray(), s.z.toarray(), s.s.toarray()
    assert pos.min() >= 0 and z.max() <= 0 and ss.max() <= 0
    for part in (pos, z, ss):
        assert np.all(np.diag(part) == 0)
    np.testing.assert_array_equal(s.diag.toarray(), np.diag(op.matrix.diagonal()))
