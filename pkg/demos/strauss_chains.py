"""Strauss point processes by Markov chain Monte Carlo.

Two chains over the unit square: a fixed-n Metropolis sampler whose
stationary pair-count mean we can pin down exactly for n = 2, and a
reversible-jump birth/death chain whose mean count must collapse to the
Poisson value when the interaction is switched off (gamma = 1).
"""

import numpy as np

from spgen.mcmc import (
    StraussParams,
    numpairs,
    run_conditional_strauss,
    run_rj_strauss,
)
from spgen.rng import RngStream
from spgen.validate import chain_mean_report, pair_probability_oracle

# --- conditional chain, n = 2 ----------------------------------------------
# With two points the density reduces to gamma^{1[dist < r]}, so
# P(s = 1) = gamma q / (gamma q + 1 - q) where q = P(|U - V| < r) for
# independent uniforms.  The oracle below estimates q by plain Monte Carlo,
# entirely outside the chain under test.
r, gamma = 0.25, 0.3
q, q_se = pair_probability_oracle(r, 2_000_000, stream=RngStream(7))
target = gamma * q / (gamma * q + 1.0 - q)
print(f"uniform pair within {r}: q = {q:.4f} (se {q_se:.1e})")

params = StraussParams(beta=1.0, gamma=gamma, r=r)
summary = run_conditional_strauss(2, params, 60_000, RngStream(8),
                                  proposal_sigma=0.3)
report = chain_mean_report("P(s=1), n=2 chain", summary.s_trace, target)
print(report.line())

# --- reversible jump, interaction off --------------------------------------
# gamma = 1 makes the Strauss density constant in s: the process is plain
# Poisson(beta) and E[N] = beta on the unit square.
free = StraussParams(beta=40.0, gamma=1.0, r=0.05)
summary = run_rj_strauss(free, 80_000, RngStream(9))
report = chain_mean_report("E[N], rj chain at gamma=1", summary.n_trace, 40.0)
print(report.line())

# --- reversible jump, inhibition on ----------------------------------------
# Hard-ish repulsion thins both the count and the close pairs relative to
# the free chain.
tight = StraussParams(beta=40.0, gamma=0.2, r=0.08)
summary = run_rj_strauss(tight, 80_000, RngStream(10))
burn = len(summary.n_trace) // 10
n_mean = summary.n_trace[burn:].mean()
s_mean = summary.s_trace[burn:].mean()
final = summary.final_pattern()
print(f"rj chain at gamma=0.2, r=0.08: mean count {n_mean:.1f} (< 40), "
      f"mean close pairs {s_mean:.2f}")
print(f"final state: {len(final)} points, {numpairs(final.points, tight.r)} "
      f"close pairs")
