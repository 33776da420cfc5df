"""
Stencils, the quadrature oracle, and why the scheme is not an M-matrix
=====================================================================

The Q2 finite difference operator is assembled from per-axis line stencils.
Here we look at the 1D matrix for seven interior points, compare the stencil
assembly with a direct Gauss-Lobatto quadrature assembly on a random
coefficient, and see the positive off-diagonal entries that rule out the
plain M-matrix argument.
"""

import numpy as np

from monotone_q2 import CoefficientField, assemble, assemble_1d_laplacian, build_grid_1d, build_grid_2d
from monotone_q2.analysis import inverse_min_entries, is_m_matrix_wcdd, is_z_pattern
from monotone_q2.quadrature import assemble_via_quadrature

np.set_printoptions(linewidth=120, precision=3, suppress=True)

###############################################################################
# The 1D Laplacian, times h². Cell-center rows are the classic (-1, 2, -1);
# cell-end rows reach two points out with +1/4.
g = build_grid_1d(7)
L = assemble_1d_laplacian(g)
print(L.toarray() * g.h**2)

###############################################################################
# Those +1/4 entries make it fail the Z-pattern test, yet the inverse is
# nonnegative.
print("Z-pattern:", bool(is_z_pattern(L.matrix)), "|", is_z_pattern(L.matrix).reason)
print("M-matrix test:", bool(is_m_matrix_wcdd(L.matrix)))
inv = inverse_min_entries(L)
print(f"min inverse entry: {inv.min_bar:.2e} ({inv.classify(inv.min_bar)} at threshold {inv.threshold:.1e})")

###############################################################################
# Stencil assembly against quadrature assembly, on a rough 2D coefficient.
rng = np.random.default_rng(0)
g2 = build_grid_2d(7, 15, (0, 1, 0, 2))
coeff = CoefficientField(rng.uniform(0.1, 5.0, g2.shape), rng.uniform(0, 10, g2.shape))
A = assemble(g2, coeff).toarray()
B = assemble_via_quadrature(g2, coeff).toarray()
print("relative gap, stencils vs quadrature:", np.abs(A - B).max() / np.abs(A).max())
