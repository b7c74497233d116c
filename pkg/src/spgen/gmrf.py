"""Gaussian Markov random fields on lattices via banded precision matrices.

A zero entry in the precision matrix means conditional independence, so a
4-neighbor lattice gives a sparse banded precision.  With row-major site
ordering the bandwidth is the lattice side m, and band Cholesky factors the
n x n precision in O(n (p^2 + 3p)) flops instead of O(n^3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .errors import FactorizationError, InvalidParameterError
from .grid import Field, Grid2D
from .rng import RngStream

# Same failed-pivot rule as the dense module, for oracle agreement.
PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class BandMatrix:
    """Symmetric (or lower-triangular) band matrix in LAPACK lower-band storage.

    ``bands`` has shape (p+1, n): ``bands[k, j]`` holds entry (j+k, j), i.e.
    row 0 is the main diagonal.  Entries with |i-j| > p are identically zero.
    """

    n: int
    p: int
    bands: np.ndarray

    def __post_init__(self):
        bands = np.asarray(self.bands, dtype=float)
        if bands.shape != (self.p + 1, self.n):
            raise InvalidParameterError(
                f"bands shape {bands.shape} != (p+1, n) = {(self.p + 1, self.n)}"
            )
        object.__setattr__(self, "bands", bands)

    def to_dense_symmetric(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        for k in range(self.p + 1):
            for j in range(self.n - k):
                out[j + k, j] = self.bands[k, j]
                out[j, j + k] = self.bands[k, j]
        return out

    def to_dense_lower(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        for k in range(self.p + 1):
            for j in range(self.n - k):
                out[j + k, j] = self.bands[k, j]
        return out


@dataclass(frozen=True)
class LatticeGmrfSpec:
    """m x m lattice field: ``diag_value`` on the diagonal of the precision,
    ``neighbor_value`` for 4-neighbor adjacencies (truncated at edges)."""

    m: int
    diag_value: float = 2.0
    neighbor_value: float = -0.5

    def __post_init__(self):
        if self.m < 1:
            raise InvalidParameterError("lattice side must be >= 1")


def build_lattice_precision(spec: LatticeGmrfSpec) -> BandMatrix:
    """Banded precision of the 4-neighbor lattice, row-major site ordering.

    Site (row r, col c) maps to index r*m + c; horizontal neighbors sit on
    the first off-diagonal (absent across row seams), vertical neighbors on
    off-diagonal m.  Bandwidth is therefore p = m.
    """
    m = spec.m
    n = m * m
    bands = np.zeros((m + 1, n))
    bands[0, :] = spec.diag_value
    if m > 1:
        horizontal = np.ones(n - 1) * spec.neighbor_value
        horizontal[m - 1 :: m] = 0.0  # no edge between (r, m-1) and (r+1, 0)
        bands[1, : n - 1] = horizontal
        bands[m, : n - m] = spec.neighbor_value
    return BandMatrix(n=n, p=m, bands=bands)


def band_cholesky(M: BandMatrix) -> BandMatrix:
    """Lower band factor D with D D^T = M; bandwidth is preserved.

    Raises :class:`FactorizationError` with the failing pivot index when M is
    not positive definite (pivot tolerance matching the dense module).
    """
    c, info = lapack.dpbtrf(M.bands, lower=1)
    if info > 0:
        raise FactorizationError(pivot_index=info - 1)
    if info < 0:
        raise InvalidParameterError(f"illegal value in argument {-info} of dpbtrf")
    pivots = c[0, :] ** 2
    tol = PIVOT_RTOL * M.bands[0, :].max()
    bad = np.nonzero(pivots <= tol)[0]
    if bad.size:
        raise FactorizationError(pivot_index=int(bad[0]))
    return BandMatrix(n=M.n, p=M.p, bands=c)


def band_solve_lower_transposed(D: BandMatrix, z: np.ndarray) -> np.ndarray:
    """Solve D^T y = z for lower band D by back-substitution within the band."""
    y, info = lapack.dtbtrs(D.bands, z, uplo=b"L", trans=b"T")
    if info != 0:
        raise InvalidParameterError(f"triangular band solve failed (info={info})")
    return y


def sample_gmrf_vectors(spec: LatticeGmrfSpec, mean, stream: RngStream,
                        size: int) -> np.ndarray:
    """``size`` draws from N(mean, precision^-1), one row per draw."""
    prec = build_lattice_precision(spec)
    D = band_cholesky(prec)
    n = prec.n
    mean = _mean_vector(mean, n)
    z = stream.std_normals((n, size))
    y = band_solve_lower_transposed(D, z)
    return (mean[:, None] + y).T


def sample_gmrf(spec: LatticeGmrfSpec, mean, stream: RngStream) -> Field:
    """One m x m lattice field with distribution N(mean, precision^-1)."""
    x = sample_gmrf_vectors(spec, mean, stream, size=1)[0]
    grid = Grid2D(nx=spec.m, ny=spec.m)
    return Field(grid, x.reshape(spec.m, spec.m))


def _mean_vector(mean, n: int) -> np.ndarray:
    if mean is None:
        return np.zeros(n)
    mean = np.asarray(mean, dtype=float)
    if mean.ndim == 0:
        return np.full(n, float(mean))
    if mean.shape != (n,):
        raise InvalidParameterError(f"mean must be a scalar or a vector of length {n}")
    return mean
