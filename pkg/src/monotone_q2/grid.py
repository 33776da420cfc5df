"""Uniform grids for the finite difference form of the C0-Q2 element.

Every grid point of a uniform mesh with an odd number of interior points per
axis is a Gauss-Lobatto node of some quadratic element. In one dimension the
interior nodes alternate between cell centers (odd index) and cell ends (even
index). In two dimensions the parity of ``(i, j)`` decides the role::

    (odd, odd)    cell center
    (even, even)  knot (element corner)
    (even, odd)   center of an edge parallel to the y-axis  -> EDGE_CENTER_X
    (odd, even)   center of an edge parallel to the x-axis  -> EDGE_CENTER_Y

The ``EDGE_CENTER_X`` / ``EDGE_CENTER_Y`` names record the axis along which
the five-point (cell end) line stencil acts through that point.

Grid points, boundary included, are linearized with ``j`` outer and ``i``
inner: ``k = i + j * (nx + 2)``. Per-point arrays are stored with shape
``(nx + 2, ny + 2)`` and flattened in Fortran order, which gives the same
ordering.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "PointClass",
    "Grid1D",
    "Grid2D",
    "build_grid_1d",
    "build_grid_2d",
    "classify_1d",
    "classify_2d",
]


class PointClass(enum.Enum):
    BOUNDARY = "boundary"
    CELL_CENTER = "cell_center"
    CELL_END = "cell_end"
    EDGE_CENTER_X = "edge_center_x"
    EDGE_CENTER_Y = "edge_center_y"
    KNOT = "knot"


def _check_odd(name: str, n: int) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise ValueError(f"{name} must be an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise ValueError(f"{name} must be a positive odd integer, got {n}")
    if n % 2 == 0:
        raise ValueError(f"{name} must be odd, got {n}")
    return n


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid ``x_0 < ... < x_{n+1}`` on ``[x_lo, x_hi]``."""

    n: int
    h: float
    domain: tuple[float, float]

    @property
    def dim(self) -> int:
        return 1

    @property
    def size(self) -> int:
        return self.n + 2

    @property
    def shape(self) -> tuple[int]:
        return (self.n + 2,)

    @property
    def n_cells(self) -> int:
        return (self.n + 1) // 2

    @cached_property
    def points(self) -> np.ndarray:
        return self.domain[0] + self.h * np.arange(self.n + 2)

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.size, dtype=bool)
        mask[[0, -1]] = True
        return mask

    @cached_property
    def interior_indices(self) -> np.ndarray:
        return np.arange(1, self.n + 1)

    def classify(self, i: int) -> PointClass:
        return classify_1d(self, i)


@dataclass(frozen=True)
class Grid2D:
    """Uniform grid with common spacing ``h`` on a rectangle."""

    nx: int
    ny: int
    h: float
    domain: tuple[float, float, float, float]

    @property
    def dim(self) -> int:
        return 2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx + 2, self.ny + 2)

    @property
    def size(self) -> int:
        return (self.nx + 2) * (self.ny + 2)

    @property
    def n_cells(self) -> tuple[int, int]:
        return ((self.nx + 1) // 2, (self.ny + 1) // 2)

    @cached_property
    def x(self) -> np.ndarray:
        return self.domain[0] + self.h * np.arange(self.nx + 2)

    @cached_property
    def y(self) -> np.ndarray:
        return self.domain[2] + self.h * np.arange(self.ny + 2)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays of shape ``(nx + 2, ny + 2)`` (``ij`` indexing)."""
        return np.meshgrid(self.x, self.y, indexing="ij")

    def index(self, i, j):
        return i + j * (self.nx + 2)

    def unravel(self, k):
        return k % (self.nx + 2), k // (self.nx + 2)

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[[0, -1], :] = True
        mask[:, [0, -1]] = True
        return mask.ravel(order="F")

    @cached_property
    def interior_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary_mask)

    def classify(self, i: int, j: int) -> PointClass:
        return classify_2d(self, i, j)


def build_grid_1d(n: int, interval=(0.0, 1.0)) -> Grid1D:
    """Uniform grid with ``n`` (odd) interior points on ``interval``.

    >>> build_grid_1d(7).h
    0.125
    """
    n = _check_odd("n", n)
    lo, hi = map(float, interval)
    if not hi > lo:
        raise ValueError(f"degenerate interval [{lo}, {hi}]")
    return Grid1D(n=n, h=(hi - lo) / (n + 1), domain=(lo, hi))


def build_grid_2d(nx: int, ny: int, rect=(0.0, 1.0, 0.0, 1.0)) -> Grid2D:
    """Uniform grid on ``rect = (x_lo, x_hi, y_lo, y_hi)`` with a common ``h``.

    The side lengths must be consistent with a single mesh width:
    ``(x_hi - x_lo) / (nx + 1) == (y_hi - y_lo) / (ny + 1)`` to 1e-12 relative.
    """
    nx = _check_odd("nx", nx)
    ny = _check_odd("ny", ny)
    x_lo, x_hi, y_lo, y_hi = map(float, rect)
    if not (x_hi > x_lo and y_hi > y_lo):
        raise ValueError(f"degenerate rectangle {rect}")
    hx = (x_hi - x_lo) / (nx + 1)
    hy = (y_hi - y_lo) / (ny + 1)
    if abs(hx - hy) > 1e-12 * max(hx, hy):
        raise ValueError(
            f"inconsistent aspect ratio: h_x = {hx:g} but h_y = {hy:g}; "
            "the rectangle must hold a whole number of square cells"
        )
    return Grid2D(nx=nx, ny=ny, h=hx, domain=(x_lo, x_hi, y_lo, y_hi))


def classify_1d(grid: Grid1D, i: int) -> PointClass:
    if not 0 <= i <= grid.n + 1:
        raise IndexError(f"index {i} outside 0..{grid.n + 1}")
    if i == 0 or i == grid.n + 1:
        return PointClass.BOUNDARY
    return PointClass.CELL_CENTER if i % 2 == 1 else PointClass.CELL_END


def classify_2d(grid: Grid2D, i: int, j: int) -> PointClass:
    if not (0 <= i <= grid.nx + 1 and 0 <= j <= grid.ny + 1):
        raise IndexError(f"index ({i}, {j}) outside the {grid.shape} grid")
    if i in (0, grid.nx + 1) or j in (0, grid.ny + 1):
        return PointClass.BOUNDARY
    odd_i, odd_j = i % 2 == 1, j % 2 == 1
    if odd_i and odd_j:
        return PointClass.CELL_CENTER
    if not odd_i and not odd_j:
        return PointClass.KNOT
    # five-point line stencil acts along the even-indexed axis
    return PointClass.EDGE_CENTER_X if odd_j else PointClass.EDGE_CENTER_Y
