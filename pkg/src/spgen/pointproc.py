"""Direct (non-MCMC) point-process generation.

Poisson measures by inversion and by thinning, independent marking, Hawkes
branching clusters, Neyman-Scott clusters (uniform-ball and Gaussian
kernels), Cox processes, and shot-noise Cox processes.

Cluster generators draw each center's offspring from a child stream split off
the main stream, so distinct centers consume disjoint randomness and the
output is reproducible center by center.  The split ids are salted with one
draw from the parent stream per call; without the salt, repeated calls on a
shared stream would replay identical offspring randomness per center index.
The salt is kept in the pattern metadata so any single cluster can be rebuilt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import (
    GenerationCapError,
    IntensityBoundError,
    InvalidParameterError,
    SupercriticalBranchingError,
)
from .grid import Field
from .rng import RngStream

# Midpoint-rule resolution for numeric mean measures of callable intensities.
QUADRATURE_N = 256

# Probe resolution for spot-checking a declared intensity bound.
BOUND_PROBE_N = 64

HAWKES_MAX_POINTS = 1_000_000

# Child-stream salts live below 2^62, leaving headroom so salt + center index
# never wraps the 64-bit child id space.
SALT_BOUND = 2**62

# A Gaussian offspring displacement beyond 4 sigma carries < 1e-4 of the mass
# per axis; used to dilate windows for Gaussian-kernel cluster centers.
GAUSS_DILATION_SIGMAS = 4.0


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle: the observation window."""

    lower: tuple[float, float]
    upper: tuple[float, float]

    def __post_init__(self):
        if not (self.lower[0] < self.upper[0] and self.lower[1] < self.upper[1]):
            raise InvalidParameterError("window lower must be strictly below upper")

    @property
    def area(self) -> float:
        return (self.upper[0] - self.lower[0]) * (self.upper[1] - self.lower[1])

    def dilated(self, margin: float) -> "Window":
        if margin < 0:
            raise InvalidParameterError("margin must be nonnegative")
        lo = (self.lower[0] - margin, self.lower[1] - margin)
        hi = (self.upper[0] + margin, self.upper[1] + margin)
        return Window(lo, hi)

    def contains(self, points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(points)
        return (
            (p[:, 0] >= self.lower[0])
            & (p[:, 0] < self.upper[0])
            & (p[:, 1] >= self.lower[1])
            & (p[:, 1] < self.upper[1])
        )

    def sample_uniform(self, stream: RngStream, k: int) -> np.ndarray:
        u = stream.uniforms((k, 2))
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        return lo + u * (hi - lo)


UNIT_SQUARE = Window((0.0, 0.0), (1.0, 1.0))


@dataclass(frozen=True)
class PointPattern:
    """Finite set of planar points in a window, optionally marked."""

    points: np.ndarray
    window: Window
    marks: np.ndarray | None = None
    metadata: dict = dataclass_field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(pts)):
            raise InvalidParameterError("points must be finite")
        object.__setattr__(self, "points", pts)
        if self.marks is not None:
            marks = np.asarray(self.marks)
            if marks.shape[0] != len(pts):
                raise InvalidParameterError("marks length must match point count")
            object.__setattr__(self, "marks", marks)

    def __len__(self) -> int:
        return self.points.shape[0]


# --- intensity specifications -------------------------------------------------

@dataclass(frozen=True)
class HomogeneousIntensity:
    """Constant intensity lam >= 0."""

    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise InvalidParameterError("intensity must be nonnegative and finite")

    def at(self, points) -> np.ndarray:
        return np.full(np.atleast_2d(points).shape[0], self.lam)

    def max_bound(self) -> float:
        return self.lam

    def total_mass(self, window: Window) -> float:
        return self.lam * window.area


@dataclass(frozen=True)
class CallableIntensity:
    """Intensity given by a function fn(x, y) (vectorized over arrays) with a
    caller-asserted upper bound ``lam_max`` on the window."""

    fn: object
    lam_max: float

    def __post_init__(self):
        if not (math.isfinite(self.lam_max) and self.lam_max > 0):
            raise InvalidParameterError("lam_max must be positive and finite")

    def at(self, points) -> np.ndarray:
        p = np.atleast_2d(points)
        vals = np.asarray(self.fn(p[:, 0], p[:, 1]), dtype=float)
        if np.any(vals < 0):
            raise InvalidParameterError("intensity function returned a negative value")
        return vals

    def max_bound(self) -> float:
        return self.lam_max

    def total_mass(self, window: Window) -> float:
        xc, yc = _midpoint_grid(window, QUADRATURE_N)
        vals = np.asarray(self.fn(xc, yc), dtype=float)
        return float(vals.mean() * window.area)


@dataclass(frozen=True)
class FieldIntensity:
    """Intensity piecewise constant on the cells of a field's grid.

    Cell (i, j) spans the half-open box [x_i, x_i + dx) x [y_j, y_j + dy);
    ``mapping`` converts the stored field value of the cell to an intensity.
    """

    field: Field
    mapping: object = None

    def _cell_values(self) -> np.ndarray:
        vals = self.field.values
        return vals if self.mapping is None else np.asarray(self.mapping(vals), dtype=float)

    def at(self, points) -> np.ndarray:
        p = np.atleast_2d(points)
        g = self.field.grid
        i = np.floor((p[:, 0] - g.origin[0]) / g.dx).astype(int)
        j = np.floor((p[:, 1] - g.origin[1]) / g.dy).astype(int)
        if np.any(i < 0) or np.any(i >= g.nx) or np.any(j < 0) or np.any(j >= g.ny):
            raise InvalidParameterError("point outside the intensity field extent")
        vals = self._cell_values()[j, i]
        if np.any(vals < 0):
            raise InvalidParameterError("mapped intensity is negative")
        return vals

    def max_bound(self) -> float:
        return float(self._cell_values().max())

    def total_mass(self, window: Window) -> float:
        xc, yc = _midpoint_grid(window, QUADRATURE_N)
        return float(self.at(np.stack([xc.ravel(), yc.ravel()], axis=1)).mean() * window.area)


IntensitySpec = HomogeneousIntensity | CallableIntensity | FieldIntensity


def quadratic_intensity(scale: float) -> CallableIntensity:
    """lam(x1, x2) = scale * (x1^2 + x2^2), bounded by 2*scale on the unit square."""
    return CallableIntensity(fn=lambda x, y: scale * (x * x + y * y), lam_max=2.0 * scale)


def _midpoint_grid(window: Window, n: int):
    xs = window.lower[0] + (np.arange(n) + 0.5) / n * (window.upper[0] - window.lower[0])
    ys = window.lower[1] + (np.arange(n) + 0.5) / n * (window.upper[1] - window.lower[1])
    return np.meshgrid(xs, ys)


def _check_bound(intensity: IntensitySpec, window: Window) -> float:
    """Spot-check the declared bound on a probe grid; return the bound."""
    bound = intensity.max_bound()
    xc, yc = _midpoint_grid(window, BOUND_PROBE_N)
    probe = intensity.at(np.stack([xc.ravel(), yc.ravel()], axis=1))
    worst = float(probe.max()) if probe.size else 0.0
    if worst > bound * (1 + 1e-12):
        raise IntensityBoundError(
            f"declared bound {bound} exceeded on probe grid (observed {worst})"
        )
    return bound


# --- Poisson processes ----------------------------------------------------------

def sample_poisson_inversion(intensity: IntensitySpec, window: Window,
                             stream: RngStream) -> PointPattern:
    """Poisson process by inversion: draw N ~ Poi(mu(E)), then N iid points
    with density lam / mu(E) by acceptance-rejection under the bound."""
    mu = intensity.total_mass(window)
    if mu == 0:
        return PointPattern(np.empty((0, 2)), window)
    bound = _check_bound(intensity, window)
    n = stream.poisson(mu)
    points = _rejection_sample(intensity, window, bound, n, stream)
    return PointPattern(points, window)


def _rejection_sample(intensity, window, bound, n, stream) -> np.ndarray:
    out = np.empty((n, 2))
    filled = 0
    while filled < n:
        k = max(64, int(1.5 * (n - filled)))
        cand = window.sample_uniform(stream, k)
        lam = intensity.at(cand)
        if np.any(lam > bound * (1 + 1e-12)):
            raise IntensityBoundError(
                f"observed intensity {lam.max()} above declared bound {bound}"
            )
        keep = stream.uniforms(k) * bound < lam
        kept = cand[keep]
        take = min(len(kept), n - filled)
        out[filled : filled + take] = kept[:take]
        filled += take
    return out


def sample_poisson_thinning(intensity: IntensitySpec, window: Window,
                            stream: RngStream) -> PointPattern:
    """Poisson process by thinning: a homogeneous proposal at the bound rate,
    each point retained with probability lam(x) / bound."""
    bound = _check_bound(intensity, window)
    if bound == 0:
        return PointPattern(np.empty((0, 2)), window)
    n = stream.poisson(bound * window.area)
    cand = window.sample_uniform(stream, n)
    lam = intensity.at(cand) if n else np.empty(0)
    if n and np.any(lam > bound * (1 + 1e-12)):
        raise IntensityBoundError(
            f"observed intensity {lam.max()} above declared bound {bound}"
        )
    keep = stream.uniforms(n) * bound < lam if n else np.empty(0, dtype=bool)
    return PointPattern(cand[keep], window)


def uniform_marks(low: float, high: float):
    """Mark sampler: iid U[low, high) marks."""
    if not low < high:
        raise InvalidParameterError("low must be below high")

    def sampler(stream: RngStream, k: int) -> np.ndarray:
        return low + (high - low) * stream.uniforms(k)

    return sampler


def constant_marks(value: float):
    """Mark sampler: every mark equals ``value``."""

    def sampler(stream: RngStream, k: int) -> np.ndarray:
        return np.full(k, float(value))

    return sampler


def sample_marked_poisson(intensity: IntensitySpec, window: Window, mark_sampler,
                          stream: RngStream) -> PointPattern:
    """Poisson points with independent marks from ``mark_sampler(stream, k)``."""
    base = sample_poisson_inversion(intensity, window, stream)
    marks = np.asarray(mark_sampler(stream, len(base)))
    return PointPattern(base.points, window, marks=marks)


# --- cluster processes ----------------------------------------------------------

def sample_hawkes(center_intensity: float, alpha: float, sigma: float,
                  window: Window, stream: RngStream,
                  max_points: int = HAWKES_MAX_POINTS) -> PointPattern:
    """Self-exciting cluster process via its branching representation.

    Immigrant centers form a homogeneous Poisson process on the window; every
    point (of any generation) spawns Poi(alpha) children displaced by iid
    N(0, sigma^2 I).  Requires alpha < 1, else the cascade is supercritical.
    All generations are returned, including points that wander outside the
    window (flagged in metadata).
    """
    if not (math.isfinite(alpha) and alpha >= 0):
        raise InvalidParameterError("alpha must be nonnegative and finite")
    if alpha >= 1:
        raise SupercriticalBranchingError(
            f"branching ratio alpha={alpha} must be < 1 for the cascade to die out"
        )
    if sigma < 0:
        raise InvalidParameterError("sigma must be nonnegative")
    n_centers = stream.poisson(center_intensity * window.area)
    centers = window.sample_uniform(stream, n_centers)
    salt = stream.integers(0, SALT_BOUND)
    collected = [centers]
    total = n_centers
    for idx in range(n_centers):
        child_stream = stream.child(salt + idx)
        # breadth-first cascade below this immigrant
        queue = [centers[idx]]
        while queue:
            next_gen = []
            for parent in queue:
                k = child_stream.poisson(alpha)
                if k:
                    offs = parent + sigma * child_stream.std_normals((k, 2))
                    next_gen.append(offs)
                    total += k
                    if total > max_points:
                        raise GenerationCapError(
                            f"cascade exceeded {max_points} points; "
                            "alpha is too close to 1 for this window"
                        )
            if next_gen:
                batch = np.concatenate(next_gen)
                collected.append(batch)
                queue = list(batch)
            else:
                queue = []
    points = np.concatenate(collected) if collected else np.empty((0, 2))
    return PointPattern(
        points,
        window,
        metadata={"includes_outside_window": True, "offspring_salt": int(salt)},
    )


@dataclass(frozen=True)
class MaternBall:
    """Offspring uniform in a ball of radius r around the center."""

    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise InvalidParameterError("radius must be positive")

    @property
    def dilation(self) -> float:
        return self.r

    def sample_offsets(self, stream: RngStream, k: int) -> np.ndarray:
        # radius via sqrt for uniformity in area
        rad = self.r * np.sqrt(stream.uniforms(k))
        ang = 2.0 * math.pi * stream.uniforms(k)
        return np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)


@dataclass(frozen=True)
class ThomasGauss:
    """Offspring displaced by N(0, sigma^2 I) around the center."""

    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidParameterError("sigma must be positive")

    @property
    def dilation(self) -> float:
        return GAUSS_DILATION_SIGMAS * self.sigma

    def sample_offsets(self, stream: RngStream, k: int) -> np.ndarray:
        return self.sigma * stream.std_normals((k, 2))


def sample_neyman_scott(kappa: float, alpha: float, kernel, window: Window,
                        stream: RngStream) -> PointPattern:
    """Cluster process: hidden centers, Poi(alpha) offspring per center.

    Centers form a homogeneous Poisson process of rate kappa on the window
    dilated by the kernel reach, so clusters centered just outside still
    contribute; the centers themselves are not part of the output.
    """
    if not (kappa > 0 and alpha >= 0):
        raise InvalidParameterError("kappa must be positive and alpha nonnegative")
    extended = window.dilated(kernel.dilation)
    n_centers = stream.poisson(kappa * extended.area)
    centers = extended.sample_uniform(stream, n_centers)
    salt = stream.integers(0, SALT_BOUND)
    groups = []
    for idx in range(n_centers):
        child_stream = stream.child(salt + idx)
        k = child_stream.poisson(alpha)
        if k:
            groups.append(centers[idx] + kernel.sample_offsets(child_stream, k))
    points = np.concatenate(groups) if groups else np.empty((0, 2))
    # centers ride along in metadata (not in the pattern) so cluster
    # membership invariants stay checkable
    return PointPattern(
        points,
        window,
        metadata={
            "includes_outside_window": True,
            "n_centers": int(n_centers),
            "centers": centers,
            "offspring_salt": int(salt),
        },
    )


# --- Cox processes ---------------------------------------------------------------

def sample_cox(random_intensity_sampler, window: Window,
               stream: RngStream) -> PointPattern:
    """Doubly stochastic Poisson process: draw an intensity, then points.

    ``random_intensity_sampler(stream)`` must return an intensity spec.  The
    realized intensity is kept in the output metadata for reproducibility.
    """
    intensity = random_intensity_sampler(stream)
    pattern = sample_poisson_inversion(intensity, window, stream)
    return PointPattern(
        pattern.points, window, metadata={"realized_intensity": intensity}
    )


def sample_shot_noise_cox(center_intensity, mark_sampler, kernel, window: Window,
                          stream: RngStream) -> PointPattern:
    """Shot-noise Cox process by its cluster representation.

    Centers form a Poisson process with intensity ``center_intensity`` on the
    window dilated by the kernel reach; center j receives a mark gamma_j from
    ``mark_sampler``, spawns Poi(gamma_j) points placed by the kernel. The
    hidden centers are not part of the output.
    """
    if isinstance(center_intensity, (int, float)):
        center_intensity = HomogeneousIntensity(float(center_intensity))
    extended = window.dilated(kernel.dilation)
    centers = sample_poisson_inversion(center_intensity, extended, stream).points
    marks = np.asarray(mark_sampler(stream, len(centers)), dtype=float)
    if np.any(marks < 0):
        raise InvalidParameterError("shot-noise marks must be nonnegative")
    salt = stream.integers(0, SALT_BOUND)
    groups = []
    for idx in range(len(centers)):
        child_stream = stream.child(salt + idx)
        k = child_stream.poisson(marks[idx])
        if k:
            groups.append(centers[idx] + kernel.sample_offsets(child_stream, k))
    points = np.concatenate(groups) if groups else np.empty((0, 2))
    return PointPattern(
        points,
        window,
        metadata={
            "includes_outside_window": True,
            "n_centers": len(centers),
            "offspring_salt": int(salt),
        },
    )


def shot_noise_g_center_intensity(alpha: float, beta: float, lam: float) -> float:
    """Center intensity K = beta * lam^-alpha / alpha of the shot-noise G model."""
    if not (alpha > 0 and beta > 0 and lam > 0):
        raise InvalidParameterError("alpha, beta, lam must be positive")
    return beta * lam ** (-alpha) / alpha


def gamma_marks(alpha: float, lam: float):
    """Mark sampler: iid Gamma(alpha, lam) marks (mean alpha/lam)."""

    def sampler(stream: RngStream, k: int) -> np.ndarray:
        if k == 0:
            return np.empty(0)
        return stream.gammas(alpha, lam, k)

    return sampler


# --- point CSV format -------------------------------------------------------------

def write_points_csv(pattern: PointPattern, path) -> None:
    """Header ``x,y`` (or ``x,y,mark``), one point per row, 17 significant digits."""
    with open(path, "w") as fh:
        if pattern.marks is None:
            fh.write("x,y\n")
            for x, y in pattern.points:
                fh.write(f"{x:.17g},{y:.17g}\n")
        else:
            fh.write("x,y,mark\n")
            for (x, y), mark in zip(pattern.points, pattern.marks):
                fh.write(f"{x:.17g},{y:.17g},{float(mark):.17g}\n")


def read_points_csv(path, window: Window | None = None) -> PointPattern:
    with open(path) as fh:
        header = fh.readline().strip()
        if header not in ("x,y", "x,y,mark"):
            raise InvalidParameterError(f"unexpected point CSV header {header!r}")
        has_marks = header == "x,y,mark"
        rows = [line.strip().split(",") for line in fh if line.strip()]
    pts = np.array([[float(r[0]), float(r[1])] for r in rows]).reshape(-1, 2)
    marks = np.array([float(r[2]) for r in rows]) if has_marks else None
    if window is None:
        window = UNIT_SQUARE
    return PointPattern(pts, window, marks=marks)
