"""
Inverse positivity on three test families
=========================================

We compute the smallest entries of the inverse operator for a smooth
variable coefficient, for i.i.d. random coefficients and for one backward
Euler step of the heat equation, on meshes from 2x4 to 16x32 cells. Values
below ``1e-12 * max|inverse|`` in magnitude count as zero.
"""

from monotone_q2.experiments import run_heat_backward_euler, run_random_coefficient, run_smooth_coefficient

###############################################################################
# Smooth coefficient ``a = 1 + d cos(πx) cos(πy)``, ``c = 10``. For d close to
# one the coarse meshes produce negative entries that vanish under refinement.
print(run_smooth_coefficient([0.5, 0.9, 0.99], lorenz=False).format())

###############################################################################
# Random ``a ~ U(d, d + 1)`` with ``c = 0``. A narrow relative range (d = 10)
# is certified by the two-cell ratio bound; d = 0.1 is not and fails.
print(run_random_coefficient([0.1, 1.0, 10.0], seed=0, lorenz=False).format())

###############################################################################
# Backward Euler with ``Δt = ratio · h²``. Small time steps break positivity.
print(run_heat_backward_euler([1.5, 0.5, 0.25], lorenz=False).format())
