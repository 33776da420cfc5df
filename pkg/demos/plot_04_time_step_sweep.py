"""
Where does the backward Euler step lose positivity?
===================================================

Sweep ``Δt / h²`` on the 16x32 cell mesh and bisect the ratio at which the
smallest inverse entry stops being negative. The sufficient mesh condition
asks for ``Δt / h² > 2/3``; the observed threshold is much smaller.
"""

import numpy as np

from monotone_q2.experiments import sweep_dt_ratio

res = sweep_dt_ratio((16, 32), np.linspace(0.2, 0.5, 7), tol=1e-3)
for r, b, i in zip(res.ratios, res.min_bar, res.min_interior):
    print(f"dt/h^2 = {r:.3f}   min full {b: .3e}   min interior {i: .3e}")
print(f"sign change near dt/h^2 = {res.sign_change:.4f} (1/3.6 = {1 / 3.6:.4f})")

###############################################################################
# Write the curve for gnuplot: ``plot 'sweep.dat' using 1:2 with lines``.
res.to_gnuplot("sweep.dat")
