import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from monotone_q2.grid import PointClass, build_grid_1d, build_grid_2d, classify_1d, classify_2d

odd = st.integers(0, 6).map(lambda k: 2 * k + 1)


def test_grid_1d_n7():
    g = build_grid_1d(7)
    assert g.h == 0.125
    np.testing.assert_allclose(g.points, np.arange(9) / 8)
    assert g.n_cells == 4


def test_grid_1d_single_cell():
    g = build_grid_1d(1)
    assert g.h == 0.5
    assert g.interior_indices.tolist() == [1]
    assert classify_1d(g, 1) is PointClass.CELL_CENTER


@pytest.mark.parametrize("n, msg", [(4, "must be odd"), (0, "positive"), (-3, "positive"), (2.5, "integer")])
def test_grid_1d_rejects(n, msg):
    with pytest.raises(ValueError, match=msg):
        build_grid_1d(n)


def test_grid_1d_rejects_degenerate_interval():
    with pytest.raises(ValueError, match="degenerate"):
        build_grid_1d(3, (1.0, 1.0))


@pytest.mark.parametrize(
    "i, expected",
    [(0, PointClass.BOUNDARY), (3, PointClass.CELL_CENTER), (4, PointClass.CELL_END), (8, PointClass.BOUNDARY)],
)
def test_classify_1d(i, expected):
    assert classify_1d(build_grid_1d(7), i) is expected


@pytest.mark.parametrize("i", [-1, 9])
def test_classify_1d_out_of_range(i):
    with pytest.raises(IndexError):
        classify_1d(build_grid_1d(7), i)


def test_grid_2d_study_mesh():
    g = build_grid_2d(7, 15, (0, 1, 0, 2))
    assert g.h == 0.125
    assert g.shape == (9, 17)
    assert g.n_cells == (4, 8)


def test_grid_2d_single_point():
    g = build_grid_2d(1, 1)
    assert g.h == 0.5
    assert g.interior_indices.tolist() == [g.index(1, 1)]


def test_grid_2d_rejects_aspect_ratio():
    with pytest.raises(ValueError, match="aspect ratio"):
        build_grid_2d(7, 7, (0, 1, 0, 2))


@pytest.mark.parametrize("nx, ny", [(2, 3), (3, 4)])
def test_grid_2d_rejects_even(nx, ny):
    with pytest.raises(ValueError, match="odd"):
        build_grid_2d(nx, ny)


@pytest.mark.parametrize(
    "i, j, expected",
    [
        (1, 1, PointClass.CELL_CENTER),
        (2, 2, PointClass.KNOT),
        (1, 2, PointClass.EDGE_CENTER_Y),  # edge parallel to the x-axis
        (2, 1, PointClass.EDGE_CENTER_X),  # edge parallel to the y-axis
        (0, 3, PointClass.BOUNDARY),
        (3, 4, PointClass.BOUNDARY),
    ],
)
def test_classify_2d(i, j, expected):
    assert classify_2d(build_grid_2d(3, 3), i, j) is expected


def test_classify_2d_out_of_range():
    with pytest.raises(IndexError):
        classify_2d(build_grid_2d(3, 3), 5, 0)


def test_index_order_is_i_fastest():
    g = build_grid_2d(3, 5, (0, 1, 0, 1.5))
    ks = [g.index(i, j) for j in range(7) for i in range(5)]
    assert ks == list(range(g.size))
    assert g.unravel(g.index(3, 4)) == (3, 4)
    x, y = g.mesh()
    k = g.index(2, 3)
    assert x.ravel(order="F")[k] == g.x[2] and y.ravel(order="F")[k] == g.y[3]


@given(odd, odd)
def test_classes_partition_interior(nx, ny):
    g = build_grid_2d(nx, ny, (0, 1, 0, (ny + 1) / (nx + 1)))
    counts = {c: 0 for c in PointClass}
    for j in range(ny + 2):
        for i in range(nx + 2):
            cls = classify_2d(g, i, j)
            counts[cls] += 1
            assert (cls is PointClass.BOUNDARY) == bool(g.boundary_mask[g.index(i, j)])
    mx, my = g.n_cells
    assert counts[PointClass.CELL_CENTER] == mx * my
    assert counts[PointClass.KNOT] == (mx - 1) * (my - 1)
    assert counts[PointClass.EDGE_CENTER_Y] == mx * (my - 1)
    assert counts[PointClass.EDGE_CENTER_X] == (mx - 1) * my
    assert sum(counts.values()) == g.size
