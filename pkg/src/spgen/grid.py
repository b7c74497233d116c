"""Grid geometry, field storage, the torus metric, and named covariance models.

Fields are stored row-major as ``values[j, i]`` where ``j`` indexes y and
``i`` indexes x; this (j, i) convention is used everywhere in the package.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import InvalidParameterError

GRID_MAGIC = b"SPGF"
GRID_FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHIIdddd")


@dataclass(frozen=True)
class Grid2D:
    """Regular 2D grid: ``nx`` x ``ny`` points spaced ``dx``, ``dy`` from ``origin``."""

    nx: int
    ny: int
    dx: float = 1.0
    dy: float = 1.0
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise InvalidParameterError("grid must have at least one point per axis")
        if not (self.dx > 0 and self.dy > 0):
            raise InvalidParameterError("grid spacings must be positive")

    @property
    def shape(self) -> tuple[int, int]:
        """(ny, nx), the shape of a value array on this grid."""
        return (self.ny, self.nx)

    def xs(self) -> np.ndarray:
        return self.origin[0] + self.dx * np.arange(self.nx)

    def ys(self) -> np.ndarray:
        return self.origin[1] + self.dy * np.arange(self.ny)

    def point(self, i: int, j: int) -> tuple[float, float]:
        """Coordinates of grid node (i, j): i along x, j along y."""
        return (self.origin[0] + i * self.dx, self.origin[1] + j * self.dy)


@dataclass(frozen=True)
class Field:
    """Real values sampled on a :class:`Grid2D`; ``values[j, i]`` is node (i, j)."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise InvalidParameterError(
                f"values shape {values.shape} does not match grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("field values must be finite")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class MaskedField:
    """A field plus a validity mask (1 = inside the region of interest)."""

    field: Field
    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=np.uint8)
        if mask.shape != self.field.grid.shape:
            raise InvalidParameterError("mask shape does not match grid shape")
        object.__setattr__(self, "mask", mask)


def torus_distance(s, t) -> float:
    """Euclidean distance between points of [0,1)^2 glued into a torus.

    Per axis the distance is min{|s_k - t_k|, 1 - |s_k - t_k|}, so the result
    never exceeds sqrt(1/2).
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if s.shape != (2,) or t.shape != (2,):
        raise InvalidParameterError("torus points must be 2-vectors")
    if np.any(s < 0) or np.any(s >= 1) or np.any(t < 0) or np.any(t >= 1):
        raise InvalidParameterError("torus coordinates must lie in [0, 1)")
    d = np.abs(s - t)
    d = np.minimum(d, 1.0 - d)
    return float(np.sqrt(np.sum(d * d)))


def _torus_lag_norm(h) -> np.ndarray:
    """Torus norm of arbitrary lag vectors (wrapped into [0, 1/2] per axis)."""
    h = np.asarray(h, dtype=float)
    d = np.abs(h) % 1.0
    d = np.minimum(d, 1.0 - d)
    return np.sqrt(np.sum(d * d, axis=-1))


def stein_table_constants(alpha: float) -> tuple[float, float, float, float]:
    """Return (R, beta, c2, c0) making the quadratic-plus-cubic taper valid.

    For alpha <= 1.5 the taper radius R = 1 suffices and the cubic part
    vanishes; for alpha > 1.5, R = 2 with a nonzero cubic coefficient.
    """
    if not 0 < alpha < 2:
        raise InvalidParameterError("alpha must lie in (0, 2)")
    if alpha <= 1.5:
        R = 1.0
        beta = 0.0
        c2 = alpha / 2.0
        c0 = 1.0 - alpha / 2.0
    else:
        R = 2.0
        beta = alpha * (2.0 - alpha) / (3.0 * R * (R * R - 1.0))
        c2 = (alpha - beta * (R - 1.0) ** 2 * (R + 2.0)) / 2.0
        c0 = beta * (R - 1.0) ** 3 + 1.0 - c2
    return R, beta, c2, c0


# Covariance model variants.  Stationary variants implement cov_lag(h);
# nonstationary ones implement cov_pair(s, t).  eval_cov dispatches.

@dataclass(frozen=True)
class TorusExp:
    """exp{-c * d(s,t)^alpha} with d the unit-torus distance."""

    c: float
    alpha: float

    def __post_init__(self):
        if not self.c > 0:
            raise InvalidParameterError("c must be positive")
        if not 0 < self.alpha <= 2:
            raise InvalidParameterError("alpha must lie in (0, 2]")

    def cov_lag(self, h) -> float:
        return float(np.exp(-self.c * _torus_lag_norm(_as_lag2(h)) ** self.alpha))


@dataclass(frozen=True)
class Wavy:
    """An anisotropic oscillating covariance with fixed length scales 50 and 15.

    A named benchmark model, not a family; the constants are part of the
    definition and are exposed read-only.
    """

    scale_x: float = dataclass_field(default=50.0, init=False)
    scale_y: float = dataclass_field(default=15.0, init=False)

    def cov_lag(self, h) -> float:
        h1, h2 = _as_lag2(h)
        qx = (h1 / self.scale_x) ** 2
        qy = (h2 / self.scale_y) ** 2
        cross = h1 * h2 / (self.scale_x * self.scale_y)
        return float((1.0 - qx - cross - qy) * np.exp(-(qx + qy)))


@dataclass(frozen=True)
class FgnCov1D:
    """Stationary increment covariance of a 1-D H-self-similar path, alpha = 2H."""

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise InvalidParameterError("alpha must lie in (0, 2)")

    def cov_lag(self, k) -> float:
        k = float(np.asarray(k).reshape(()))
        a = self.alpha
        return 0.5 * (abs(k + 1) ** a - 2 * abs(k) ** a + abs(k - 1) ** a)


@dataclass(frozen=True)
class FgnCov2D:
    """Separable 2-D increment covariance: product of the 1-D form per axis."""

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise InvalidParameterError("alpha must lie in (0, 2)")

    def cov_lag(self, h) -> float:
        k, l = _as_lag2(h)
        one_d = FgnCov1D(self.alpha)
        return one_d.cov_lag(k) * one_d.cov_lag(l)


@dataclass(frozen=True)
class FbfCov:
    """Nonstationary self-similar field covariance ||s||^a + ||t||^a - ||s-t||^a."""

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise InvalidParameterError("alpha must lie in (0, 2)")

    def cov_pair(self, s, t) -> float:
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        if s.shape != (2,) or t.shape != (2,):
            raise InvalidParameterError("expected 2-vectors")
        a = self.alpha
        ns = np.sqrt(np.sum(s * s))
        nt = np.sqrt(np.sum(t * t))
        nd = np.sqrt(np.sum((s - t) ** 2))
        return float(ns**a + nt**a - nd**a)


@dataclass(frozen=True)
class SteinPsi:
    """Compactly supported taper: quadratic minus power inside the unit ball,
    cubic decay out to R, zero beyond.

    The constants must satisfy the closed-form relations of
    :func:`stein_table_constants`; this is validated at construction.
    """

    alpha: float
    R: float
    beta: float
    c0: float
    c2: float

    def __post_init__(self):
        R, beta, c2, c0 = stein_table_constants(self.alpha)
        expected = np.array([R, beta, c2, c0])
        got = np.array([self.R, self.beta, self.c2, self.c0])
        if not np.allclose(got, expected, rtol=0, atol=1e-12):
            raise InvalidParameterError(
                "Stein constants inconsistent with alpha "
                f"(expected R,beta,c2,c0 = {tuple(expected)})"
            )

    @classmethod
    def from_alpha(cls, alpha: float) -> "SteinPsi":
        R, beta, c2, c0 = stein_table_constants(alpha)
        return cls(alpha=alpha, R=R, beta=beta, c2=c2, c0=c0)

    def psi(self, h_norm) -> np.ndarray:
        """Evaluate the taper at nonnegative radii (vectorized)."""
        r = np.asarray(h_norm, dtype=float)
        if np.any(r < 0):
            raise InvalidParameterError("radius must be nonnegative")
        out = np.zeros_like(r)
        inner = r <= 1.0
        out = np.where(inner, self.c0 + self.c2 * r**2 - r**self.alpha, out)
        mid = (r > 1.0) & (r < self.R)
        if np.any(mid):
            rm = np.where(mid, r, 1.0)  # avoid 0-division outside the branch
            out = np.where(mid, self.beta * (self.R - rm) ** 3 / rm, out)
        return out if out.ndim else float(out)

    def cov_lag(self, h) -> float:
        h1, h2 = _as_lag2(h)
        return float(self.psi(np.hypot(h1, h2)))


@dataclass(frozen=True)
class WienerPillow:
    """Nonstationary covariance prod_k (min(s_k,t_k) - s_k t_k) on [0,1]^d."""

    d: int

    def __post_init__(self):
        if self.d < 1:
            raise InvalidParameterError("dimension must be >= 1")

    def cov_pair(self, s, t) -> float:
        s, t = _as_unit_cube_pair(s, t, self.d)
        return float(np.prod(np.minimum(s, t) - s * t))


@dataclass(frozen=True)
class WienerBridge:
    """Nonstationary covariance prod_k min(s_k,t_k) - prod_k s_k t_k on [0,1]^d."""

    d: int

    def __post_init__(self):
        if self.d < 1:
            raise InvalidParameterError("dimension must be >= 1")

    def cov_pair(self, s, t) -> float:
        s, t = _as_unit_cube_pair(s, t, self.d)
        return float(np.prod(np.minimum(s, t)) - np.prod(s * t))


_STATIONARY = (TorusExp, Wavy, FgnCov1D, FgnCov2D, SteinPsi)
_NONSTATIONARY = (FbfCov, WienerPillow, WienerBridge)

CovarianceModel = (
    TorusExp | Wavy | FgnCov1D | FgnCov2D | FbfCov | SteinPsi | WienerPillow | WienerBridge
)


def _as_lag2(h) -> tuple[float, float]:
    h = np.asarray(h, dtype=float)
    if h.shape != (2,):
        raise InvalidParameterError("expected a 2-vector lag")
    return float(h[0]), float(h[1])


def _as_unit_cube_pair(s, t, d):
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if s.shape != (d,) or t.shape != (d,):
        raise InvalidParameterError(f"expected {d}-vectors")
    if np.any((s < 0) | (s > 1)) or np.any((t < 0) | (t > 1)):
        raise InvalidParameterError("coordinates must lie in [0, 1]")
    return s, t


def eval_cov(model: CovarianceModel, h):
    """Evaluate a covariance model.

    Stationary variants take a lag ``h`` (a scalar for :class:`FgnCov1D`, a
    2-vector otherwise) and ``eval_cov(model, 0)`` is the variance.
    Nonstationary variants (:class:`FbfCov`, :class:`WienerPillow`,
    :class:`WienerBridge`) take a pair ``(s, t)`` of points instead; lag-style
    calls are rejected.
    """
    if isinstance(model, FgnCov1D):
        h = np.asarray(h, dtype=float)
        if h.shape != ():
            raise InvalidParameterError("FgnCov1D takes a scalar lag")
        return model.cov_lag(h)
    if isinstance(model, _STATIONARY):
        return model.cov_lag(h)
    if isinstance(model, _NONSTATIONARY):
        if not (isinstance(h, tuple) and len(h) == 2):
            raise InvalidParameterError(
                "nonstationary models take a pair (s, t) of points, not a lag"
            )
        return model.cov_pair(h[0], h[1])
    raise InvalidParameterError(f"unknown covariance model {model!r}")


# Grid binary format: magic "SPGF", u16 version, u32 nx, u32 ny,
# f64 dx, dy, origin_x, origin_y, then ny*nx f64 little-endian row-major.

def write_grid_binary(field: Field, path) -> None:
    grid = field.grid
    header = _HEADER.pack(
        GRID_MAGIC,
        GRID_FORMAT_VERSION,
        grid.nx,
        grid.ny,
        grid.dx,
        grid.dy,
        grid.origin[0],
        grid.origin[1],
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def read_grid_binary(path) -> Field:
    with open(path, "rb") as fh:
        raw = fh.read()
    return _parse_grid_binary(raw)[0]


def _parse_grid_binary(raw: bytes) -> tuple[Field, int]:
    """Parse a grid blob; return the field and the offset past its payload."""
    if len(raw) < _HEADER.size:
        raise InvalidParameterError("truncated grid file")
    magic, version, nx, ny, dx, dy, ox, oy = _HEADER.unpack_from(raw)
    if magic != GRID_MAGIC:
        raise InvalidParameterError("not a grid file (bad magic)")
    if version != GRID_FORMAT_VERSION:
        raise InvalidParameterError(f"unsupported grid format version {version}")
    end = _HEADER.size + 8 * nx * ny
    if len(raw) < end:
        raise InvalidParameterError("truncated grid file")
    values = np.frombuffer(raw[_HEADER.size : end], dtype="<f8").reshape(ny, nx)
    grid = Grid2D(nx=nx, ny=ny, dx=dx, dy=dy, origin=(ox, oy))
    return Field(grid, values.copy()), end


def write_masked_grid_binary(masked: MaskedField, path) -> None:
    """Grid binary followed by one mask byte per cell (0 = outside)."""
    write_grid_binary(masked.field, path)
    with open(path, "ab") as fh:
        fh.write(np.ascontiguousarray(masked.mask, dtype=np.uint8).tobytes())


def read_masked_grid_binary(path) -> MaskedField:
    with open(path, "rb") as fh:
        raw = fh.read()
    field, end = _parse_grid_binary(raw)
    n = field.grid.nx * field.grid.ny
    if len(raw) < end + n:
        raise InvalidParameterError("truncated mask payload")
    mask = np.frombuffer(raw[end : end + n], dtype=np.uint8).reshape(field.grid.shape)
    return MaskedField(field, mask.copy())
