"""Kernels, their self-convolutions, and picking h by leave-one-out CV."""

import numpy as np

from bradykde.bandwidth import default_bandwidth_grid, select_bandwidth
from bradykde.density import kde_univariate
from bradykde.kernels import KernelKind, eval_convolution, eval_kernel, kernel_moments

print("kernel         k(0)    kbar(0)  kappa   kappa2")
for kind in KernelKind:
    k, k2 = kernel_moments(kind)
    print(f"{kind.value:<14} {eval_kernel(kind, 0.0):.4f}  {eval_convolution(kind, 0.0):.4f}   {k:.4f}  {k2:.4f}")

# A bimodal sample: too small an h splits every point, too large merges the modes.
rng = np.random.default_rng(0)
x = np.r_[rng.normal(-2, 0.5, 150), rng.normal(1.5, 1.0, 250)]

grid = default_bandwidth_grid(x)
for kind in ("gaussian", "epanechnikov"):
    h, curve = select_bandwidth(x, kind, grid)
    i = int(np.argmin(curve.score))
    print(f"\n{kind}: h_cv = {h:.3f} (grid {grid[0]:.3f} .. {grid[-1]:.3f}, index {i} of {len(grid)})")
    print(f"  CV at h_min {curve.score[0]: .4f}   at h_cv {curve.score[i]: .4f}   at h_max {curve.score[-1]: .4f}")

h, _ = select_bandwidth(x, "gaussian", grid)
print("\n  x     p_hat(x)")
for xi in np.linspace(-4, 4, 9):
    bar = "#" * int(60 * kde_univariate(x, "gaussian", h, xi))
    print(f"{xi:5.1f}  {kde_univariate(x, 'gaussian', h, xi):.4f} {bar}")
