"""Deterministic random variate generation.

Every generator in the package draws its randomness from an :class:`RngStream`,
a thin wrapper around a counter-based Philox bit generator keyed by
``(seed, stream_id)``.  Same key and same call sequence give a bit-identical
output sequence; distinct stream ids give streams with no shared state, which
is how the package parallelizes (one stream per worker, never shared).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidParameterError

_U64 = 1 << 64
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    # Finalizer of the splitmix64 generator; bijective on 64-bit ints.
    x &= _U64 - 1
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) % _U64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) % _U64
    return x ^ (x >> 31)


def _check_u64(value: int, name: str) -> int:
    if not isinstance(value, (int, np.integer)):
        raise InvalidParameterError(f"{name} must be an integer")
    value = int(value)
    if not 0 <= value < _U64:
        raise InvalidParameterError(f"{name} must be in [0, 2^64)")
    return value


class RngStream:
    """Seeded random source with independent sub-streams.

    Parameters
    ----------
    seed : int
        Base seed, 64-bit unsigned.
    stream_id : int
        Sub-stream selector, 64-bit unsigned.  Streams with distinct ids are
        statistically independent (distinct Philox keys).
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = _check_u64(seed, "seed")
        self.stream_id = _check_u64(stream_id, "stream_id")
        self._gen = np.random.Generator(
            np.random.Philox(key=np.array([self.seed, self.stream_id], dtype=np.uint64))
        )

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def child(self, index: int) -> "RngStream":
        """Derive the ``index``-th child stream.

        The child id mixes ``stream_id`` and ``index`` through a bijective
        64-bit hash, so children of different parents (and different indices)
        collide only with probability ~2^-64 per pair.
        """
        index = _check_u64(index, "index")
        mixed = _splitmix64((self.stream_id + (index + 1) * _GOLDEN) % _U64)
        return RngStream(self.seed, mixed)

    # scalar draws

    def uniform(self) -> float:
        """One U[0,1) variate."""
        return float(self._gen.random())

    def std_normal(self) -> float:
        """One N(0,1) variate."""
        return float(self._gen.standard_normal())

    def poisson(self, mean: float) -> int:
        """One Poisson(mean) variate."""
        _check_poisson_mean(mean)
        return int(self._gen.poisson(mean))

    def gamma(self, shape: float, rate: float) -> float:
        """One Gamma(shape, rate) variate with mean shape/rate."""
        _check_gamma_params(shape, rate)
        return float(self._gen.gamma(shape, 1.0 / rate))

    def complex_std_normal(self) -> tuple[float, float]:
        """Independent (re, im) pair, each N(0,1)."""
        re = float(self._gen.standard_normal())
        im = float(self._gen.standard_normal())
        return re, im

    # vector draws (same distributions; order of consumption is part of the
    # reproducibility contract)

    def uniforms(self, size) -> np.ndarray:
        return self._gen.random(size)

    def std_normals(self, size) -> np.ndarray:
        return self._gen.standard_normal(size)

    def poissons(self, mean: float, size) -> np.ndarray:
        _check_poisson_mean(mean)
        return self._gen.poisson(mean, size)

    def gammas(self, shape, rate, size=None) -> np.ndarray:
        shape = np.asarray(shape, dtype=float)
        rate = np.asarray(rate, dtype=float)
        if not (np.all(np.isfinite(shape)) and np.all(shape > 0)):
            raise InvalidParameterError("gamma shape must be positive and finite")
        if not (np.all(np.isfinite(rate)) and np.all(rate > 0)):
            raise InvalidParameterError("gamma rate must be positive and finite")
        return self._gen.gamma(shape, 1.0 / rate, size)

    def complex_std_normals(self, size) -> np.ndarray:
        re = self._gen.standard_normal(size)
        im = self._gen.standard_normal(size)
        return re + 1j * im

    def integers(self, low: int, high: int) -> int:
        """One integer uniform on {low, ..., high-1}."""
        return int(self._gen.integers(low, high))

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)


def _check_poisson_mean(mean) -> None:
    mean = float(mean)
    if not (math.isfinite(mean) and mean >= 0):
        raise InvalidParameterError("poisson mean must be nonnegative and finite")


def _check_gamma_params(shape, rate) -> None:
    shape = float(shape)
    rate = float(rate)
    if not (math.isfinite(shape) and shape > 0):
        raise InvalidParameterError("gamma shape must be positive and finite")
    if not (math.isfinite(rate) and rate > 0):
        raise InvalidParameterError("gamma rate must be positive and finite")


# Free-function forms of the five basic draws.

def draw_uniform(stream: RngStream) -> float:
    return stream.uniform()


def draw_std_normal(stream: RngStream) -> float:
    return stream.std_normal()


def draw_poisson(stream: RngStream, mean: float) -> int:
    return stream.poisson(mean)


def draw_gamma(stream: RngStream, shape: float, rate: float) -> float:
    return stream.gamma(shape, rate)


def draw_complex_std_normal(stream: RngStream) -> tuple[float, float]:
    return stream.complex_std_normal()
