"""Jump processes built from a Levy measure: truncated-path sampling of the
gamma subordinator, lossless refinement of the truncation level, the exact
gamma-increment oracle, and a gamma-driven random sheet.

Every small-jump band that the truncation drops is paid back through the
drift, so the path mean is alpha * t at every truncation level.
"""

import numpy as np

from spgen.levy import (
    expected_sheet_value,
    gamma_jump_sampler,
    gamma_levy_measure,
    gamma_path_spec,
    refine_path,
    sample_compound_poisson,
    sample_gamma_process_direct,
    sample_gamma_sheet,
    sample_levy_path,
    gamma_sheet_spec,
    gamma_sheet_values_at,
)
from spgen.rng import RngStream

stream = RngStream(5150)
alpha = 4.0

# The measure alpha e^-x / x is infinite near zero but integrates x^2: the
# classic infinite-activity, finite-variation case.
measure = gamma_levy_measure(alpha)
print(f"gamma measure (alpha={alpha}): tail mass above 1 = "
      f"{measure.tail_mass(1.0):.4f}, above 0.01 = {measure.tail_mass(0.01):.2f}, "
      f"total mass infinite")

# Compound Poisson is the finite-activity building block: jumps above the
# truncation arrive at the tail-mass rate.  Rate times mean jump telescopes
# to alpha e^-1, so the expected sum over t=500 is 500 alpha / e.
big_jumps = lambda s, k: gamma_jump_sampler(1.0, (1.0, np.inf), s, k)  # noqa: E731
cp = sample_compound_poisson(float(measure.tail_mass(1.0)), big_jumps, 500.0, stream)
print(f"compound poisson of the big jumps over t=500: {cp:.1f} "
      f"(mean {500 * alpha * np.exp(-1):.1f})")

# Truncated paths: drop jumps below epsilon, compensate the band against the
# drift.  The mean is exactly alpha * t regardless of epsilon; only the
# fine structure of the path changes.
times = np.linspace(0.1, 1.0, 10)
spec = gamma_path_spec(alpha, 0.5)
k = 3000
ends = np.array([
    sample_levy_path(spec, times, stream.child(i)).values[-1] for i in range(k)
])
print(f"truncated path (eps=0.5), X_1 over {k} draws: mean {ends.mean():.3f} "
      f"(alpha = {alpha}), var {ends.var():.3f} "
      f"(exact {alpha * 1.5 * np.exp(-0.5):.3f})")

# Refinement adds the missing band (eps_new, eps_old] to an existing path
# without resampling what is already there.  Coupled draws show the value
# moving while the law stays put.
coarse = sample_levy_path(spec, times, stream.child(9000))
fine = refine_path(coarse, spec, 0.05, stream.child(9001))
print(f"one path, eps 0.5 -> 0.05: X_1 moves {coarse.values[-1]:+.3f} -> "
      f"{fine.values[-1]:+.3f}, epsilon tag {coarse.epsilon} -> {fine.epsilon}")

# The direct gamma-increment construction is the exact reference law.
direct = np.array([
    sample_gamma_process_direct(alpha, times, stream.child(10_000 + i)).values[-1]
    for i in range(k)
])
print(f"direct gamma oracle, X_1: mean {direct.mean():.3f}, "
      f"var {direct.var():.3f} (exact {alpha:.3f})")

# A random sheet driven by a gamma lattice measure: nonnegative by
# construction, mean field known in closed form.
spec2 = gamma_sheet_spec(n=50, r=0.1, alpha=100.0, beta=1.0)
sheet = sample_gamma_sheet(spec2, 40, stream)
center = (0.5, 0.5)
vals = gamma_sheet_values_at(spec2, center, stream, 20_000)
print(f"gamma sheet on a 40x40 grid: min {sheet.values.min():.4f} (>= 0), "
      f"mean {sheet.values.mean():.4f}")
print(f"value at {center}: empirical mean {vals.mean():.5f}, "
      f"exact {expected_sheet_value(spec2, center):.5f}")
