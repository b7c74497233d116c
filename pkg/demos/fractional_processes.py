"""Fractional Gaussian processes: noise, paths, sheets, and the planar
field with covariance ||s||^a + ||t||^a - ||s-t||^a.

The Hurst index H controls roughness through the increment correlation
(2^(2H) - 2)/2 at lag 1: negative below 1/2, zero at 1/2, positive above.
The quadratic variation of a path on an n-grid scales like n^(1-2H), which
a single realization already shows convincingly.
"""

import numpy as np

from spgen.fractional import (
    plan_fgn,
    sample_fbf,
    sample_fbm,
    sample_fgn,
    sample_fractional_wiener_sheet,
    sample_wiener_path,
    stein_constants,
    pillow_bridge_cov,
)
from spgen.rng import RngStream

stream = RngStream(77)
n = 4096

print("fractional Gaussian noise, lag-1 increment correlation:")
for H in (0.3, 0.5, 0.8):
    plan = plan_fgn(n, H)
    x = sample_fgn(plan, stream)
    emp = np.corrcoef(x[:-1], x[1:])[0, 1]
    exact = (2.0 ** (2 * H) - 2.0) / 2.0
    print(f"  H={H}: empirical {emp:+.3f}, exact {exact:+.3f}")

print("fractional Brownian motion, quadratic variation on the unit grid:")
for H in (0.3, 0.5, 0.8):
    _, w = sample_fbm(n, H, stream)
    qv = np.sum(np.diff(w) ** 2)
    print(f"  H={H}: sum of squared increments {qv:10.4f} "
          f"(n^(1-2H) = {n ** (1 - 2 * H):10.4f})")

# The H = 1/2 path is standard Brownian motion; the direct constructor
# agrees in law and accepts arbitrary time grids.
times = np.linspace(0.0, 2.0, 9)[1:]
w = sample_wiener_path(times, stream)
print(f"wiener path on (0, 2]: final value {w[-1]:+.3f} "
      f"(std at t=2 is {np.sqrt(2):.3f})")

# Sheets vanish on both axes and factorize across them.
sheet = sample_fractional_wiener_sheet(64, 0.7, stream)
print(f"sheet 65x65 at H=0.7: axes max |value| "
      f"{max(abs(sheet.values[0]).max(), abs(sheet.values[:, 0]).max()):.1e}, "
      f"corner value {sheet.values[-1, -1]:+.3f}")

# The planar field: a tapered stationary field plus a linear adjustment
# gives the exact target covariance on the quarter disk.  The taper
# constants switch branches at alpha = 3/2.
for alpha in (1.2, 1.6):
    c = stein_constants(alpha)
    print(f"taper constants at alpha={alpha}: R={c.R}, c0={c.c0:.4f}, "
          f"c2={c.c2:.4f}, beta={c.beta:.4f}")

# The sampler returns two independent fields per call (the embedding FFT
# yields a complex draw whose real and imaginary parts are free).  The grid
# spans [0, R]^2 but only the quarter disk of radius 1 is guaranteed, so
# the mask covers pi / (4 R^2) of it.
f1, f2 = sample_fbf(64, 64, 0.8, stream)
R = f1.field.grid.dx * (f1.field.values.shape[1] - 1)
print(f"fbf 64x64 at H=0.8: origin {f1.field.values[0, 0]:+.1e}, "
      f"mask covers {f1.mask.mean():.2f} of the grid "
      f"(pi/(4 R^2) = {np.pi / (4 * R * R):.2f} at R={R:.0f})")

# Conditioned variants on [0,1]^d, pinned to zero on the boundary.
print(f"pillow variance at the center (d=2): "
      f"{pillow_bridge_cov('pillow', (0.5, 0.5), (0.5, 0.5), 2):.4f}")
print(f"bridge covariance (0.3, 0.7): "
      f"{pillow_bridge_cov('bridge', (0.3,), (0.7,), 1):.4f}")
