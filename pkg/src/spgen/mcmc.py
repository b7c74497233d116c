"""Point-process densities and MCMC samplers for the pairwise-interaction
(Strauss) process on the unit square.

The target density is f(x) proportional to beta^n(x) * gamma^s(x), where n(x)
is the point count and s(x) the number of point pairs closer than r.  Two
samplers: a fixed-n random-walk Metropolis chain, and a variable-n
reversible-jump chain with equal-probability birth/death proposals.

Pair counts are maintained incrementally: each move only recounts the pairs
involving the moved, born, or deleted point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameterError
from .pointproc import UNIT_SQUARE, PointPattern, Window
from .rng import RngStream


@dataclass(frozen=True)
class StraussParams:
    """Interaction parameters; gamma <= 1 is required for the process to exist."""

    beta: float
    gamma: float
    r: float

    def __post_init__(self):
        if not self.beta >= 0:
            raise InvalidParameterError("beta must be nonnegative")
        if not 0 <= self.gamma <= 1:
            raise InvalidParameterError("gamma must lie in [0, 1]")
        if not self.r > 0:
            raise InvalidParameterError("r must be positive")


@dataclass(frozen=True)
class ChainState:
    """Configuration plus its cached pair count and step counter."""

    points: np.ndarray
    cached_s: int
    step_index: int = 0

    def __post_init__(self):
        object.__setattr__(
            self, "points", np.asarray(self.points, dtype=float).reshape(-1, 2)
        )

    @property
    def n(self) -> int:
        return self.points.shape[0]


def numpairs(points, r: float) -> int:
    """Number of unordered pairs strictly closer than r.

    Strict inequality is the normative choice (ties at exactly r do not
    count), and the diagonal is excluded.
    """
    if r <= 0:
        raise InvalidParameterError("r must be positive")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = pts.shape[0]
    if n < 2:
        return 0
    diff = pts[:, None, :] - pts[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    close = d2 < r * r
    return int((np.count_nonzero(close) - n) // 2)


def _pairs_with(points: np.ndarray, x: np.ndarray, r: float,
                exclude: int | None = None) -> int:
    """Count points strictly within r of x, optionally skipping one index."""
    if points.shape[0] == 0:
        return 0
    d2 = ((points - x) ** 2).sum(axis=1)
    close = d2 < r * r
    if exclude is not None:
        close[exclude] = False
    return int(np.count_nonzero(close))


def _gamma_power(gamma: float, exponent: int) -> float:
    # gamma = 0 needs care: 0^0 = 1, 0^positive = 0, 0^negative = +inf.
    if gamma == 0.0:
        if exponent == 0:
            return 1.0
        return 0.0 if exponent > 0 else math.inf
    return gamma**exponent


def mh_acceptance(delta_s: int, gamma: float) -> float:
    """min{gamma^(s(y) - s(x)), 1} for a fixed-n move."""
    return min(_gamma_power(gamma, delta_s), 1.0)


def rj_birth_acceptance(params: StraussParams, delta_s: int, n_new: int) -> float:
    """min{beta * gamma^(s(y)-s(x)) / n(y), 1} for a birth to n_new points."""
    return min(params.beta * _gamma_power(params.gamma, delta_s) / n_new, 1.0)


def rj_death_acceptance(params: StraussParams, delta_s: int, n_old: int) -> float:
    """min{gamma^(s(y)-s(x)) * n(x) / beta, 1} for a death from n_old points."""
    if params.beta == 0:
        return 1.0
    return min(_gamma_power(params.gamma, delta_s) * n_old / params.beta, 1.0)


def initial_state(n: int, r: float, stream: RngStream) -> ChainState:
    """Uniform iid starting configuration with its pair count."""
    points = UNIT_SQUARE.sample_uniform(stream, n)
    return ChainState(points=points, cached_s=numpairs(points, r) if n >= 2 else 0)


def mh_step(state: ChainState, params: StraussParams, proposal_sigma: float,
            stream: RngStream) -> ChainState:
    """One random-walk Metropolis update of a uniformly chosen point.

    The proposal adds N(0, sigma^2 I) to the chosen point; proposals leaving
    the unit square are rejected outright.  Acceptance depends only on the
    change in the pair count: min{gamma^(delta s), 1}.
    """
    n = state.n
    if n == 0:
        return replace(state, step_index=state.step_index + 1)
    j = stream.integers(0, n)
    z = np.array(stream.complex_std_normal())
    candidate = state.points[j] + proposal_sigma * z
    step = state.step_index + 1
    if np.any(candidate < 0.0) or np.any(candidate > 1.0):
        return replace(state, step_index=step)
    old_pairs = _pairs_with(state.points, state.points[j], params.r, exclude=j)
    new_pairs = _pairs_with(state.points, candidate, params.r, exclude=j)
    delta_s = new_pairs - old_pairs
    if stream.uniform() < mh_acceptance(delta_s, params.gamma):
        points = state.points.copy()
        points[j] = candidate
        return ChainState(points=points, cached_s=state.cached_s + delta_s,
                          step_index=step)
    return replace(state, step_index=step)


def rj_step(state: ChainState, params: StraussParams,
            stream: RngStream) -> ChainState:
    """One reversible-jump update: birth or death with probability 1/2 each.

    Birth appends a uniform point and accepts with
    min{beta gamma^(delta s) / n(y), 1}; death removes a uniformly chosen
    index and accepts with min{gamma^(delta s) n(x) / beta, 1}.  A death
    proposed from the empty configuration is an automatic rejection.
    """
    step = state.step_index + 1
    if stream.uniform() < 0.5:
        candidate = UNIT_SQUARE.sample_uniform(stream, 1)[0]
        delta_s = _pairs_with(state.points, candidate, params.r)
        if stream.uniform() < rj_birth_acceptance(params, delta_s, state.n + 1):
            points = np.concatenate([state.points, candidate[None, :]])
            return ChainState(points=points, cached_s=state.cached_s + delta_s,
                              step_index=step)
        return replace(state, step_index=step)
    if state.n == 0:
        return replace(state, step_index=step)
    j = stream.integers(0, state.n)
    delta_s = -_pairs_with(state.points, state.points[j], params.r, exclude=j)
    if stream.uniform() < rj_death_acceptance(params, delta_s, state.n):
        points = np.delete(state.points, j, axis=0)  # removal by index, not value
        return ChainState(points=points, cached_s=state.cached_s + delta_s,
                          step_index=step)
    return replace(state, step_index=step)


@dataclass(frozen=True)
class ChainSummary:
    """Per-step traces of a chain plus its final state."""

    steps: np.ndarray
    n_trace: np.ndarray
    s_trace: np.ndarray
    final_state: ChainState

    def final_pattern(self) -> PointPattern:
        return PointPattern(self.final_state.points, UNIT_SQUARE)


def run_conditional_strauss(n: int, params: StraussParams, n_steps: int,
                            stream: RngStream, proposal_sigma: float = 0.1,
                            init: ChainState | None = None) -> ChainSummary:
    """Fixed-n Metropolis chain from a uniform start; records the s trace."""
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    state = initial_state(n, params.r, stream) if init is None else init
    return _run(state, n_steps,
                lambda st: mh_step(st, params, proposal_sigma, stream))


def run_rj_strauss(params: StraussParams, n_steps: int, stream: RngStream,
                   init: ChainState | None = None) -> ChainSummary:
    """Variable-n reversible-jump chain; records n and s traces."""
    if init is None:
        init = ChainState(points=np.empty((0, 2)), cached_s=0)
    return _run(init, n_steps, lambda st: rj_step(st, params, stream))


def _run(state: ChainState, n_steps: int, step_fn) -> ChainSummary:
    if n_steps < 1:
        raise InvalidParameterError("n_steps must be >= 1")
    steps = np.empty(n_steps, dtype=np.int64)
    n_trace = np.empty(n_steps, dtype=np.int64)
    s_trace = np.empty(n_steps, dtype=np.int64)
    for k in range(n_steps):
        state = step_fn(state)
        steps[k] = state.step_index
        n_trace[k] = state.n
        s_trace[k] = state.cached_s
    return ChainSummary(steps=steps, n_trace=n_trace, s_trace=s_trace,
                        final_state=state)


def poisson_density(pattern: PointPattern, intensity) -> float:
    """Log density of an inhomogeneous Poisson pattern:
    -mu(E) + sum_i log lam(x_i) - log n!."""
    mu = intensity.total_mass(pattern.window)
    n = len(pattern)
    if n == 0:
        return -mu
    lam = intensity.at(pattern.points)
    with np.errstate(divide="ignore"):
        log_lam = np.log(lam)
    return float(-mu + log_lam.sum() - math.lgamma(n + 1))


def write_trace_csv(summary: ChainSummary, path) -> None:
    """Chain trace as CSV rows ``step,n,s``."""
    with open(path, "w") as fh:
        fh.write("step,n,s\n")
        for step, n, s in zip(summary.steps, summary.n_trace, summary.s_trace):
            fh.write(f"{step},{n},{s}\n")
