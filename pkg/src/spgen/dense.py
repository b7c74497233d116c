"""Direct Gaussian sampling by dense matrix factorization.

This is the O(n^3) reference path: factor the covariance (or precision)
matrix once, then turn iid normals into correlated samples.  It is kept for
n <= 4096 and doubles as the correctness oracle for the FFT-based samplers.
Also houses the moving-average disc smoother, the simplest spatial example.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack, solve_triangular

from .errors import FactorizationError, InvalidParameterError
from .grid import Field, Grid2D
from .rng import RngStream

# Above this size the dense path is refused; the circulant module scales.
DENSE_SIZE_LIMIT = 4096

# A pivot below this fraction of the largest diagonal entry counts as failed.
PIVOT_RTOL = 1e-12

KIND_COVARIANCE = "covariance"
KIND_PRECISION = "precision"


@dataclass(frozen=True)
class MvnSpec:
    """Multivariate normal given either its covariance or its precision matrix."""

    mean: np.ndarray
    matrix: np.ndarray
    kind: str = KIND_COVARIANCE

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        matrix = np.asarray(self.matrix, dtype=float)
        if self.kind not in (KIND_COVARIANCE, KIND_PRECISION):
            raise InvalidParameterError(f"unknown kind {self.kind!r}")
        n = mean.shape[0]
        if n < 1 or mean.ndim != 1:
            raise InvalidParameterError("mean must be a vector of length >= 1")
        if matrix.shape != (n, n):
            raise InvalidParameterError("matrix shape must match mean length")
        scale = np.abs(matrix).max()
        if scale > 0 and np.abs(matrix - matrix.T).max() > 1e-12 * scale:
            raise InvalidParameterError("matrix must be symmetric to 1e-12 relative")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "matrix", 0.5 * (matrix + matrix.T))


def cholesky_lower(M) -> np.ndarray:
    """Lower-triangular L with L @ L.T = M.

    Raises :class:`FactorizationError` naming the first failing pivot when M
    is not positive definite (including pivots below ``PIVOT_RTOL`` times the
    largest diagonal entry).
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidParameterError("matrix must be square")
    c, info = lapack.dpotrf(M, lower=1, clean=1, overwrite_a=0)
    if info > 0:
        raise FactorizationError(pivot_index=info - 1)
    if info < 0:
        raise InvalidParameterError(f"illegal value in argument {-info} of dpotrf")
    pivots = np.diagonal(c) ** 2
    tol = PIVOT_RTOL * np.diagonal(M).max()
    bad = np.nonzero(pivots <= tol)[0]
    if bad.size:
        raise FactorizationError(pivot_index=int(bad[0]))
    return c


def sample_mvn_cov(spec: MvnSpec, stream: RngStream, size: int | None = None) -> np.ndarray:
    """Draw X = mean + L Z where L is the Cholesky factor of the covariance."""
    if spec.kind != KIND_COVARIANCE:
        raise InvalidParameterError("spec kind must be covariance")
    n = spec.mean.shape[0]
    _check_dense_size(n)
    L = cholesky_lower(spec.matrix)
    z = stream.std_normals((n, 1) if size is None else (n, size))
    x = spec.mean[:, None] + L @ z
    return x[:, 0] if size is None else x.T


def sample_mvn_prec(spec: MvnSpec, stream: RngStream, size: int | None = None) -> np.ndarray:
    """Draw from N(mean, M^-1) given the precision matrix M.

    Factor M = D D^T, then solve D^T Y = Z by back-substitution; Y has
    covariance M^-1 without ever forming the inverse.
    """
    if spec.kind != KIND_PRECISION:
        raise InvalidParameterError("spec kind must be precision")
    n = spec.mean.shape[0]
    _check_dense_size(n)
    D = cholesky_lower(spec.matrix)
    z = stream.std_normals((n, 1) if size is None else (n, size))
    y = solve_triangular(D, z, lower=True, trans="T")
    x = spec.mean[:, None] + y
    return x[:, 0] if size is None else x.T


def sample_complex_sqrt(B_re, B_im, stream: RngStream) -> np.ndarray:
    """Draw Re(B Z) = B_re Z1 - B_im Z2 for a complex square root B of the covariance.

    If B B* equals the target covariance (the caller's responsibility), the
    output is a real Gaussian vector with exactly that covariance.
    """
    B_re = np.asarray(B_re, dtype=float)
    B_im = np.asarray(B_im, dtype=float)
    if B_re.ndim != 2 or B_re.shape[0] != B_re.shape[1] or B_re.shape != B_im.shape:
        raise InvalidParameterError("B_re and B_im must be square matrices of equal shape")
    n = B_re.shape[0]
    z1 = stream.std_normals(n)
    z2 = stream.std_normals(n)
    return B_re @ z1 - B_im @ z2


def disc_offsets(r: float) -> np.ndarray:
    """Integer offsets (u, v) with u^2 + v^2 <= r^2, as an (k, 2) array."""
    if r < 0:
        raise InvalidParameterError("radius must be nonnegative")
    rad = int(np.floor(r))
    u, v = np.meshgrid(np.arange(-rad, rad + 1), np.arange(-rad, rad + 1), indexing="ij")
    keep = u * u + v * v <= r * r
    return np.stack([u[keep], v[keep]], axis=1)


def moving_average_field(noise: Field, r: float) -> Field:
    """Average the noise over a disc of radius r (in index units) around each cell.

    Output is restricted to the interior where the full disc fits, so the grid
    shrinks by floor(r) cells on every side.
    """
    rad = int(np.floor(r))
    ny, nx = noise.grid.shape
    if 2 * rad >= min(nx, ny):
        raise InvalidParameterError("disc radius exceeds half the grid extent")
    offsets = disc_offsets(r)
    out_ny, out_nx = ny - 2 * rad, nx - 2 * rad
    acc = np.zeros((out_ny, out_nx))
    for du, dv in offsets:
        acc += noise.values[rad + dv : rad + dv + out_ny, rad + du : rad + du + out_nx]
    acc /= len(offsets)
    g = noise.grid
    out_grid = Grid2D(
        nx=out_nx,
        ny=out_ny,
        dx=g.dx,
        dy=g.dy,
        origin=(g.origin[0] + rad * g.dx, g.origin[1] + rad * g.dy),
    )
    return Field(out_grid, acc)


def _check_dense_size(n: int) -> None:
    if n > DENSE_SIZE_LIMIT:
        raise InvalidParameterError(
            f"dense sampling is limited to n <= {DENSE_SIZE_LIMIT}; "
            "use the circulant module for large stationary grids"
        )
