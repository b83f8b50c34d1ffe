"""Randomized Sobol' point generation.

Gray-code Sobol' construction from an embedded direction-number table
(Joe & Kuo primitive polynomials and initial direction numbers),
randomized by a per-dimension digital shift (XOR of a seed-derived
32-bit mask).  The leading all-zero point of the raw sequence is
skipped, so the unrandomized 1-D sequence starts 0.5, 0.75, 0.25, ...

Streams are deterministic: equal (dimension, seed) means bitwise-equal
point sequences, independent of platform threading.  A stream is a
mutable cursor and must not be shared between workers; use
:func:`sobol_block` to pre-generate an immutable block that any number
of readers may scan.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import InvalidArgumentError, StreamExhaustedError, UnsupportedDimensionError

__all__ = ["SobolStream", "sobol_new", "next_point", "sobol_block", "MAX_DIMENSION"]

_BITS = 32
_SCALE = float(2**_BITS)
_CLAMP_LO = 2.0**-_BITS
_CLAMP_HI = 1.0 - 2.0**-_BITS
_MAX_INDEX = 2**31


def _load_direction_table() -> list[tuple[int, int, list[int]]]:
    """Parse the packaged table: one ``d s a m_1..m_s`` line per dimension."""
    text = resources.files("bayespower.data").joinpath("joe_kuo_directions.txt").read_text()
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [int(tok) for tok in line.split()]
        d, s, a, ms = parts[0], parts[1], parts[2], parts[3:]
        if len(ms) != s:
            raise ValueError(f"malformed direction-number row for dimension {d}")
        rows.append((s, a, ms))
    return rows


_TABLE = _load_direction_table()
MAX_DIMENSION = len(_TABLE) + 1  # dimension 1 is the built-in van der Corput column


def _direction_vectors(dimension: int) -> np.ndarray:
    """Direction integers V[dim][bit], each m_i scaled into the top bits."""
    v = np.zeros((dimension, _BITS), dtype=np.uint64)
    # first coordinate: van der Corput in base 2
    for i in range(_BITS):
        v[0, i] = np.uint64(1) << np.uint64(_BITS - 1 - i)
    for dim in range(1, dimension):
        s, a, ms = _TABLE[dim - 1]
        m = list(ms)
        for i in range(s, _BITS):
            prev = m[i - s]
            newm = prev ^ (prev << s)
            for k in range(1, s):
                if (a >> (s - 1 - k)) & 1:
                    newm ^= m[i - k] << k
            m.append(newm)
        for i in range(_BITS):
            v[dim, i] = np.uint64(m[i]) << np.uint64(_BITS - 1 - i)
    return v


@dataclass
class SobolStream:
    """Cursor over a digitally shifted Sobol' sequence.

    Attributes
    ----------
    dimension : int
        Point dimension (twice the per-group parameter count downstream).
    seed : int
        64-bit seed the digital shift was derived from.
    shift : ndarray of uint64
        Per-dimension XOR masks; all zeros when randomization is off.
    index : int
        Rank of the next point to be emitted (0-based, zero point skipped).
    """

    dimension: int
    seed: int
    shift: np.ndarray
    index: int = 0
    _v: np.ndarray = field(repr=False, default=None)
    _state: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self._v is None:
            self._v = _direction_vectors(self.dimension)
        if self._state is None:
            self._state = np.zeros(self.dimension, dtype=np.uint64)


def sobol_new(dimension: int, seed: int, randomize: bool = True) -> SobolStream:
    """Create a stream positioned at index 0.

    The digital shift is derived deterministically from ``seed``;
    ``randomize=False`` exposes the raw construction for golden-value
    tests.
    """
    if not isinstance(dimension, (int, np.integer)) or isinstance(dimension, bool):
        raise InvalidArgumentError(f"sobol_new: dimension must be an integer, got {dimension!r}")
    if dimension < 1 or dimension > MAX_DIMENSION:
        raise UnsupportedDimensionError(int(dimension), MAX_DIMENSION)
    if randomize:
        rng = np.random.default_rng(np.uint64(seed) ^ np.uint64(0x9E3779B97F4A7C15))
        shift = rng.integers(0, 2**_BITS, size=dimension, dtype=np.uint64)
    else:
        shift = np.zeros(dimension, dtype=np.uint64)
    return SobolStream(dimension=int(dimension), seed=int(seed), shift=shift)


def next_point(stream: SobolStream) -> np.ndarray:
    """Emit the point at the stream's current index and advance the cursor.

    Coordinates are clamped to [2^-32, 1 - 2^-32] so downstream normal
    quantiles stay finite.
    """
    if stream.index >= _MAX_INDEX:
        raise StreamExhaustedError(f"stream exhausted after {_MAX_INDEX} points")
    # Gray-code update: flip by the direction vector of the lowest zero bit
    # of the previous rank (ranks are 1-based with the zero point dropped).
    rank = stream.index
    c = 0
    while (rank >> c) & 1:
        c += 1
    stream._state ^= stream._v[:, c]
    stream.index += 1
    u = (stream._state ^ stream.shift).astype(np.float64) / _SCALE
    return np.clip(u, _CLAMP_LO, _CLAMP_HI)


def sobol_block(dimension: int, count: int, seed: int, randomize: bool = True) -> np.ndarray:
    """Pre-generate ``count`` points as an immutable (count, dimension) block."""
    if count < 0 or count > _MAX_INDEX:
        raise InvalidArgumentError(f"sobol_block: count out of range: {count}")
    stream = sobol_new(dimension, seed, randomize=randomize)
    block = np.empty((count, dimension), dtype=np.float64)
    for r in range(count):
        block[r] = next_point(stream)
    block.setflags(write=False)
    return block
