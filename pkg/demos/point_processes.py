"""A tour of the planar point process samplers: inhomogeneous Poisson by
inversion and by thinning, marked points, cluster cascades, and Cox
(doubly stochastic) patterns.

Counts are checked against their analytic means; nothing here is plotted,
the printed numbers are the story.
"""

import numpy as np

from spgen.pointproc import (
    MaternBall,
    ThomasGauss,
    UNIT_SQUARE,
    gamma_marks,
    quadratic_intensity,
    sample_cox,
    sample_hawkes,
    sample_marked_poisson,
    sample_neyman_scott,
    sample_poisson_inversion,
    sample_poisson_thinning,
    sample_shot_noise_cox,
    shot_noise_g_center_intensity,
    uniform_marks,
    HomogeneousIntensity,
)
from spgen.rng import RngStream

stream = RngStream(404)

# Intensity 300*(x^2 + y^2) on the unit square integrates to 200.  Inversion
# and thinning target the same law through different mechanisms.
intensity = quadratic_intensity(300.0)
inv = sample_poisson_inversion(intensity, UNIT_SQUARE, stream.child(0))
thin = sample_poisson_thinning(intensity, UNIT_SQUARE, stream.child(1))
print(f"quadratic intensity, mean count 200: inversion {len(inv)}, "
      f"thinning {len(thin)}")

# Mass piles up toward the far corner; the upper-right quadrant carries
# (7/24) / (2/3) = 7/16 of it.
top = np.sum((inv.points[:, 0] > 0.5) & (inv.points[:, 1] > 0.5))
print(f"  fraction of inversion points in the upper-right quadrant: "
      f"{top / len(inv):.2f} (7/16 = {7 / 16:.2f} expected)")

# Marks are drawn after positions, independent of them.
marked = sample_marked_poisson(
    HomogeneousIntensity(50.0), UNIT_SQUARE, uniform_marks(2.0, 3.0),
    stream.child(2),
)
print(f"marked pattern: {len(marked)} points, mark range "
      f"[{marked.marks.min():.2f}, {marked.marks.max():.2f}]")

# Cluster processes: hidden centers, offspring scattered around them.  The
# patterns keep children that land outside the window, and the centers ride
# in metadata so cluster membership stays checkable.
matern = sample_neyman_scott(25.0, 6.0, MaternBall(r=0.05), UNIT_SQUARE,
                             stream.child(3))
thomas = sample_neyman_scott(25.0, 6.0, ThomasGauss(sigma=0.02), UNIT_SQUARE,
                             stream.child(4))
print(f"matern: {matern.metadata['n_centers']} centers -> {len(matern)} points; "
      f"thomas: {thomas.metadata['n_centers']} centers -> {len(thomas)} points")

# Hawkes cascades: immigrants at rate 30, each point breeding Poi(0.9)
# children.  Expected total is 30/(1-0.9) = 300, with heavy tails.
hawkes = sample_hawkes(30.0, 0.9, 0.02, UNIT_SQUARE, stream.child(5))
print(f"hawkes (alpha=0.9): {len(hawkes)} points "
      f"(mean 300, geometric cascade)")

# A Cox process randomizes the intensity itself: here the rate is constant
# per realization but Gamma distributed across realizations, so counts are
# overdispersed relative to Poisson.
def gamma_rate(s):
    return HomogeneousIntensity(s.gammas(4.0, 0.05, 1)[0])  # mean 80

counts = [len(sample_cox(gamma_rate, UNIT_SQUARE, stream.child(100 + i)))
          for i in range(400)]
counts = np.asarray(counts, dtype=float)
# Var N = E lam + Var lam = 80 + 1600 for these gamma parameters
print(f"cox counts over 400 runs: mean {counts.mean():.1f} (80 expected), "
      f"var {counts.var():.0f} (1680 expected, 80 if it were Poisson)")

# Shot-noise Cox: gamma-marked centers, each spawning Poi(mark) offspring.
# Expected count is roughly K * area * (alpha/lam) on the dilated window.
K = shot_noise_g_center_intensity(alpha=0.6, beta=200.0, lam=2.0)
snox = sample_shot_noise_cox(K, gamma_marks(0.6, 2.0), ThomasGauss(sigma=0.03),
                             UNIT_SQUARE, stream.child(6))
print(f"shot-noise cox: center intensity {K:.1f}, {len(snox)} points")
