"""
Closed-form mesh constraints
============================

The sample checks need only the coefficient values at the grid points. The
bound checks need per-cell bounds of ``a`` and its derivatives and are
cruder. Both are sufficient conditions for a nonnegative inverse.
"""

import numpy as np

from monotone_q2 import CoefficientField, build_grid_1d, build_grid_2d
from monotone_q2.constraints import bounds_from_samples, check_1d_samples, check_2d_samples, check_2d_theorem_variants

###############################################################################
# Constant coefficients: the 1D check flips at h²c = 5a, the 2D check at
# h²c = 3a/2. With h = 1/8 the thresholds are exact in floating point.
g1, g2 = build_grid_1d(7), build_grid_2d(7, 7)
for hc in (4.99, 5.0):
    rep = check_1d_samples(CoefficientField.constant(g1, 1.0, hc / g1.h**2), g1)
    print(f"1D h²c = {hc}: {'pass' if rep else 'fail'}, worst margin {rep.worst_margin:.3g}")
for hc in (1.499, 1.5):
    rep = check_2d_samples(CoefficientField.constant(g2, 1.0, hc / g2.h**2), g2)
    print(f"2D h²c = {hc}: {'pass' if rep else 'fail'}, worst margin {rep.worst_margin:.3g}")

###############################################################################
# Random coefficients: the ratio bound over two neighboring cells certifies
# a ~ U(10, 11) but not a ~ U(0.1, 1.1).
rng = np.random.default_rng(1)
for d in (10.0, 0.1):
    coeff = CoefficientField(rng.uniform(d, d + 1, g2.shape), np.zeros(g2.shape))
    rep = check_2d_theorem_variants(coeff, g2, "ratio", bounds_from_samples(coeff, g2))
    print(f"d = {d}: ratio bound {'pass' if rep else 'fail'}; per inequality {rep.by_kind()}")
