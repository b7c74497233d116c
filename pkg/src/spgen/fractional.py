"""Self-similar Gaussian processes: Wiener paths, H-self-similar paths via 1D
circulant embedding of the increment process, separable sheets, and
self-similar planar fields via a compactly supported intrinsic embedding.

The increment process of an H-self-similar path is stationary with covariance
rho(k) = ((k+1)^(2H) - 2 k^(2H) + (k-1)^(2H)) / 2, which embeds in a
nonnegative definite circulant for every H in (0, 1); one FFT therefore
yields exact increments, and cumulative summation the path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circulant import EmbeddingPlan, fft2, plan_embedding
from .errors import EmbeddingInfeasibleError, InvalidParameterError
from .grid import (
    Field,
    Grid2D,
    MaskedField,
    SteinPsi,
    WienerBridge,
    WienerPillow,
    stein_table_constants,
)
from .rng import RngStream

EIG_CLIP_TOL = 1e-15


def _check_hurst(H: float) -> float:
    if not 0 < H < 1:
        raise InvalidParameterError("H must lie in (0, 1)")
    return float(H)


def sample_wiener_path(times, stream: RngStream) -> np.ndarray:
    """Standard Wiener path at the given strictly increasing times (all >= 0).

    Built from independent increments: W gains sqrt(dt) * Z per interval,
    starting from W = 0 at time 0.
    """
    t = _check_times(times)
    dt = np.diff(np.concatenate([[0.0], t]))
    z = stream.std_normals(t.shape[0])
    return np.cumsum(np.sqrt(dt) * z)


def _check_times(times) -> np.ndarray:
    t = np.asarray(times, dtype=float).ravel()
    if t.size == 0:
        raise InvalidParameterError("need at least one time point")
    if t[0] < 0 or np.any(np.diff(t) <= 0):
        raise InvalidParameterError("times must be strictly increasing and >= 0")
    return t


def sample_brownian_motion_d(mu, sigma_sqrt, times, stream: RngStream) -> np.ndarray:
    """Drifted correlated Brownian motion: X_t = mu t + A W_t with A the given
    square root of the covariance; returns one row per time, one column per axis."""
    t = _check_times(times)
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    A = np.asarray(sigma_sqrt, dtype=float)
    d = mu.shape[0]
    if A.shape != (d, d):
        raise InvalidParameterError("sigma_sqrt must be d x d for a d-vector mu")
    dt = np.diff(np.concatenate([[0.0], t]))
    z = stream.std_normals((t.shape[0], d))
    w = np.cumsum(np.sqrt(dt)[:, None] * z, axis=0)
    return t[:, None] * mu[None, :] + w @ A.T


def fgn_covariance(k, H: float) -> np.ndarray:
    """Increment covariance rho(k) = (|k+1|^2H - 2|k|^2H + |k-1|^2H) / 2."""
    a = 2.0 * _check_hurst(H)
    k = np.abs(np.asarray(k, dtype=float))
    return 0.5 * ((k + 1) ** a - 2 * k**a + np.abs(k - 1) ** a)


@dataclass(frozen=True)
class FgnPlan:
    """Circulant eigenvalues for exact stationary-increment noise of length n."""

    n: int
    H: float
    eigenvalues: np.ndarray  # length 2n, nonnegative
    clip_count: int = 0


def plan_fgn(n: int, H: float) -> FgnPlan:
    """Even circulant embedding of the increment covariance out to lag n.

    The circulant row is [rho(0), ..., rho(n), rho(n-1), ..., rho(1)] of
    length 2n; eigenvalues are its FFT divided by 2n.
    """
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    H = _check_hurst(H)
    r = fgn_covariance(np.arange(n + 1), H)
    row = np.concatenate([r, r[-2:0:-1]])
    lam = np.real(np.fft.fft(row)) / (2 * n)
    lam_min = float(lam.min())
    if lam_min < -EIG_CLIP_TOL:
        raise EmbeddingInfeasibleError(min_eigenvalue=lam_min)
    clip = int(np.count_nonzero(lam < 0))
    if clip:
        lam = np.where(lam < 0, 0.0, lam)
    return FgnPlan(n=n, H=H, eigenvalues=lam, clip_count=clip)


def _fgn_from_z(plan: FgnPlan, z: np.ndarray) -> np.ndarray:
    # First n outputs of the FFT synthesis: exact stationary increments.
    x = np.fft.fft(np.sqrt(plan.eigenvalues) * z)
    return np.real(x[: plan.n])


def sample_fgn(plan: FgnPlan, stream: RngStream) -> np.ndarray:
    z = stream.complex_std_normals(2 * plan.n)
    return _fgn_from_z(plan, z)


def sample_fbm(n: int, H: float, stream: RngStream,
               plan: FgnPlan | None = None) -> tuple[np.ndarray, np.ndarray]:
    """H-self-similar path on {0, 1/n, ..., 1}; returns (times, values).

    The path starts at an explicit 0 and accumulates n exact increments,
    scaled by n^-H so that Var at t is t^(2H).
    """
    if plan is None:
        plan = plan_fgn(n, H)
    elif plan.n != n or plan.H != H:
        raise InvalidParameterError("plan does not match n and H")
    x = sample_fgn(plan, stream)
    w = np.concatenate([[0.0], float(n) ** (-plan.H) * np.cumsum(x)])
    times = np.arange(n + 1) / n
    return times, w


@dataclass(frozen=True)
class FgnSheetPlan:
    """Separable 2D increment-noise eigenvalues (outer product of 1D plans)."""

    n: int
    H: float
    eigenvalues: np.ndarray  # (2n, 2n), nonnegative


def plan_fgn_sheet(n: int, H: float) -> FgnSheetPlan:
    one_d = plan_fgn(n, H)
    lam = np.outer(one_d.eigenvalues, one_d.eigenvalues)
    return FgnSheetPlan(n=n, H=one_d.H, eigenvalues=lam)


def sample_fractional_wiener_sheet(n: int, H: float, stream: RngStream,
                                   plan: FgnSheetPlan | None = None) -> Field:
    """Sheet on the (n+1) x (n+1) grid {0, 1/n, ..., 1}^2, zero on the axes.

    Exact separable increment noise from the 2D circulant embedding, then a
    double cumulative sum scaled by n^-2H.
    """
    if plan is None:
        plan = plan_fgn_sheet(n, H)
    elif plan.n != n or plan.H != H:
        raise InvalidParameterError("plan does not match n and H")
    z = stream.complex_std_normals((2 * n, 2 * n))
    x = np.real(fft2(np.sqrt(plan.eigenvalues) * z))[:n, :n]
    w = np.zeros((n + 1, n + 1))
    w[1:, 1:] = float(n) ** (-2.0 * plan.H) * np.cumsum(np.cumsum(x, axis=0), axis=1)
    grid = Grid2D(nx=n + 1, ny=n + 1, dx=1.0 / n, dy=1.0 / n)
    return Field(grid, w)


@dataclass(frozen=True)
class SteinConstants:
    """Taper constants (R, beta, c2, c0); see :func:`stein_constants`."""

    R: float
    beta: float
    c2: float
    c0: float


def stein_constants(alpha: float) -> SteinConstants:
    """Closed-form constants making the intrinsic embedding nonnegative."""
    R, beta, c2, c0 = stein_table_constants(alpha)
    return SteinConstants(R=R, beta=beta, c2=c2, c0=c0)


def stein_psi(h_norm, constants: SteinConstants, alpha: float):
    """Piecewise taper value at radius ``h_norm`` (vectorized).

    Quadratic-minus-power inside the unit ball, cubic decay to R, zero
    beyond; continuous at both joins by construction of the constants.
    """
    model = SteinPsi(alpha=alpha, R=constants.R, beta=constants.beta,
                     c0=constants.c0, c2=constants.c2)
    return model.psi(h_norm)


@dataclass(frozen=True)
class FbfPlan:
    """Embedding plan plus taper constants for the self-similar planar field."""

    m: int
    n: int
    H: float
    constants: SteinConstants
    embedding: EmbeddingPlan
    mask: np.ndarray  # 1 inside the quarter disk


def plan_fbf(m: int, n: int, H: float) -> FbfPlan:
    """Plan an (m x n)-grid field over [0, R]^2 via the tapered covariance.

    The grid includes the origin, so the pinning value is read off exactly.
    The taper is supported in the ball of radius R and the extended circulant
    period exceeds 2R, making the embedding nonnegative up to rounding.
    """
    if m < 2 or n < 2:
        raise InvalidParameterError("need at least 2 grid points per axis")
    H = _check_hurst(H)
    alpha = 2.0 * H
    constants = stein_constants(alpha)
    psi = SteinPsi(alpha=alpha, R=constants.R, beta=constants.beta,
                   c0=constants.c0, c2=constants.c2)
    R = constants.R
    grid = Grid2D(nx=n, ny=m, dx=R / (n - 1), dy=R / (m - 1))

    def rho(hx, hy):
        return psi.psi(np.hypot(hx, hy))

    embedding = plan_embedding(grid, rho)
    xs, ys = np.meshgrid(grid.xs(), grid.ys())
    mask = (xs**2 + ys**2 <= 1.0).astype(np.uint8)
    return FbfPlan(m=m, n=n, H=H, constants=constants, embedding=embedding, mask=mask)


def sample_fbf(m: int, n: int, H: float, stream: RngStream,
               plan: FbfPlan | None = None) -> tuple[MaskedField, MaskedField]:
    """Two independent fields with covariance ||s||^a + ||t||^a - ||s-t||^a
    (a = 2H) between quarter-disk grid points, pinned to zero at the origin.

    Each tapered stationary field X is adjusted to
    X - X(0) + sqrt(2 c2) * t . Z with a fresh standard normal pair Z, which
    cancels the quadratic term of the taper and leaves the target covariance
    for all pairs with ||s - t|| <= 1.  The mask flags the quarter disk; grid
    cells beyond it carry no covariance guarantee.
    """
    if plan is None:
        plan = plan_fbf(m, n, H)
    elif (plan.m, plan.n, plan.H) != (m, n, float(H)):
        raise InvalidParameterError("plan does not match m, n, H")
    from .circulant import sample_embedded

    f1, f2 = sample_embedded(plan.embedding, stream)
    out = []
    grid = plan.embedding.grid
    xs, ys = np.meshgrid(grid.xs(), grid.ys())
    scale = np.sqrt(2.0 * plan.constants.c2)
    for f in (f1, f2):
        z = np.array(stream.complex_std_normal())
        values = f.values - f.values[0, 0] + scale * (xs * z[0] + ys * z[1])
        out.append(MaskedField(Field(grid, values), plan.mask))
    return out[0], out[1]


def pillow_bridge_cov(variant: str, s, t, d: int) -> float:
    """Covariance of the tied-down sheet variants on [0,1]^d.

    ``variant`` is "pillow" (product of per-axis bridge covariances) or
    "bridge" (sheet covariance minus the rank-one product term).  Sampling at
    small sizes is available through the dense module.
    """
    if variant == "pillow":
        return WienerPillow(d).cov_pair(s, t)
    if variant == "bridge":
        return WienerBridge(d).cov_pair(s, t)
    raise InvalidParameterError("variant must be 'pillow' or 'bridge'")
