"""Statistical verification helpers shared by the test suite and the CLI.

Every check produces a :class:`MomentReport` carrying the estimate, its
standard error, the target value, and the resulting z-score.  The default
pass threshold is |z| <= 3; covariance-surface checks use 4 to absorb the
multiple comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import InvalidParameterError
from .grid import Field
from .rng import RngStream

DEFAULT_Z_THRESHOLD = 3.0
COV_SURFACE_Z_THRESHOLD = 4.0


@dataclass(frozen=True)
class MomentReport:
    """Outcome of one moment check; ``passed`` means |z| <= threshold."""

    name: str
    estimate: float
    std_error: float
    target: float
    z_score: float
    passed: bool
    threshold: float = DEFAULT_Z_THRESHOLD

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (
            f"[{status}] {self.name}: estimate={self.estimate:.6g} "
            f"target={self.target:.6g} se={self.std_error:.3g} z={self.z_score:+.2f}"
        )


def make_report(name: str, estimate: float, std_error: float, target: float,
                threshold: float = DEFAULT_Z_THRESHOLD) -> MomentReport:
    if not std_error > 0:
        raise InvalidParameterError("standard error must be positive")
    z = (estimate - target) / std_error
    return MomentReport(
        name=name,
        estimate=float(estimate),
        std_error=float(std_error),
        target=float(target),
        z_score=float(z),
        passed=bool(abs(z) <= threshold),
        threshold=float(threshold),
    )


def batch_means(trace, n_batches: int = 50) -> tuple[float, float]:
    """Mean and batch-means standard error of a (possibly autocorrelated) trace.

    The trace is cut into ``n_batches`` contiguous batches; the SE of the
    overall mean is estimated from the spread of the batch means, which stays
    honest under serial dependence (unlike the iid formula).
    """
    x = np.asarray(trace, dtype=float).ravel()
    if x.size < 2 * n_batches:
        raise InvalidParameterError(
            f"trace of length {x.size} too short for {n_batches} batches"
        )
    usable = (x.size // n_batches) * n_batches
    batches = x[:usable].reshape(n_batches, -1).mean(axis=1)
    mean = float(x.mean())
    se = float(batches.std(ddof=1) / math.sqrt(n_batches))
    return mean, se


def chain_mean_report(name: str, trace, target: float, burn_in_fraction: float = 0.1,
                      n_batches: int = 50,
                      threshold: float = DEFAULT_Z_THRESHOLD) -> MomentReport:
    """Report on the post-burn-in mean of an MCMC trace (batch-means SE)."""
    x = np.asarray(trace, dtype=float).ravel()
    if not 0 <= burn_in_fraction < 1:
        raise InvalidParameterError("burn_in_fraction must lie in [0, 1)")
    start = int(burn_in_fraction * x.size)
    mean, se = batch_means(x[start:], n_batches)
    return make_report(name, mean, se, target, threshold)


def _field_values(realizations) -> np.ndarray:
    arrays = []
    for r in realizations:
        arrays.append(r.values if isinstance(r, Field) else np.asarray(r, dtype=float))
    return np.stack(arrays)


def empirical_cov_at_lag(realizations, lag: tuple[int, int], target: float,
                         name: str = "cov_at_lag", subtract_mean: bool = False,
                         n_batches: int = 50,
                         threshold: float = DEFAULT_Z_THRESHOLD) -> MomentReport:
    """Average of X[p] * X[p + lag] over positions and realizations.

    ``lag`` is (di, dj) in grid index units.  Fields are assumed zero-mean
    (true for every generator in scope); pass ``subtract_mean=True`` to
    de-mean first.  The SE comes from batching the per-realization averages.
    """
    x = _field_values(realizations)
    k, ny, nx = x.shape
    if k < 100:
        raise InvalidParameterError("need at least 100 realizations")
    di, dj = lag
    if abs(di) >= nx or abs(dj) >= ny:
        raise InvalidParameterError("lag exceeds grid extent")
    if subtract_mean:
        x = x - x.mean(axis=(1, 2), keepdims=True)
    a = x[:, max(0, dj) : ny + min(0, dj), max(0, di) : nx + min(0, di)]
    b = x[:, max(0, -dj) : ny + min(0, -dj), max(0, -di) : nx + min(0, -di)]
    per_real = (a * b).mean(axis=(1, 2))
    n_batches = min(n_batches, k // 2)
    usable = (k // n_batches) * n_batches
    batch = per_real[:usable].reshape(n_batches, -1).mean(axis=1)
    est = float(per_real.mean())
    se = float(batch.std(ddof=1) / math.sqrt(n_batches))
    return make_report(name, est, se, target, threshold)


def dispersion_test(counts, name: str = "dispersion",
                    threshold: float = DEFAULT_Z_THRESHOLD) -> MomentReport:
    """Variance-to-mean ratio of count data; 1 under a Poisson law.

    The SE uses the chi-square approximation Var(ratio) ~ 2/(k-1), valid under
    the Poisson null for means that are not tiny.
    """
    c = np.asarray(counts, dtype=float).ravel()
    if c.size < 1000:
        raise InvalidParameterError("need at least 1000 counts")
    mean = c.mean()
    if mean == 0:
        raise InvalidParameterError("all counts are zero")
    ratio = float(c.var(ddof=1) / mean)
    se = math.sqrt(2.0 / (c.size - 1))
    return make_report(name, ratio, se, 1.0, threshold)


def pair_probability_oracle(r: float, n_samples: int,
                            stream: RngStream | None = None) -> tuple[float, float]:
    """Monte Carlo estimate (with SE) of P(||U - V|| < r), U, V ~ U[0,1]^2.

    This is the brute-force oracle used by the interaction-process acceptance
    tests; it is deterministic given the stream.
    """
    if r <= 0:
        return 0.0, 0.0
    if r >= math.sqrt(2):
        return 1.0, 0.0
    if stream is None:
        stream = RngStream(20260814, 0)
    hits = 0
    remaining = int(n_samples)
    chunk = 2_000_000
    while remaining > 0:
        m = min(chunk, remaining)
        u = stream.uniforms((m, 2))
        v = stream.uniforms((m, 2))
        d2 = ((u - v) ** 2).sum(axis=1)
        hits += int(np.count_nonzero(d2 < r * r))
        remaining -= m
    p = hits / n_samples
    se = math.sqrt(max(p * (1 - p), 1e-300) / n_samples)
    return p, se


def two_sample_z(mean_a: float, se_a: float, mean_b: float, se_b: float) -> float:
    """z-statistic for the difference of two independent estimates."""
    return (mean_a - mean_b) / math.sqrt(se_a**2 + se_b**2)


def report_lines(reports) -> str:
    return "\n".join(r.line() for r in reports)


def reports_to_json(reports) -> list[dict]:
    return [asdict(r) for r in reports]
