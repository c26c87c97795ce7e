"""Counter-based random streams.

Every variate is a pure function of ``(seed, tag, index)``: the stream key is
derived from the seed and a dimension tag, and the trial index is the
counter.  Any partition of the index range over workers therefore yields the
same numbers, which is what makes parallel estimates reproducible bit for bit.

The mixing function is the SplitMix64 finalizer applied to
``key + index * golden_gamma``, i.e. SplitMix64 run with an explicit counter.
"""

from __future__ import annotations

import hashlib

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / float(1 << 53)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def stream_key(seed: int, tag: str) -> np.uint64:
    """64-bit key for the substream named ``tag`` under ``seed``."""
    digest = hashlib.sha256(f"{int(seed)}::{tag}".encode()).digest()
    return np.uint64(int.from_bytes(digest[:8], "little"))


def raw_bits(seed: int, tag: str, index: np.ndarray) -> np.ndarray:
    idx = np.asarray(index, dtype=np.uint64)
    key = stream_key(seed, tag)
    with np.errstate(over="ignore"):
        return _mix(key + idx * _GAMMA)


def uniform(seed: int, tag: str, index, low: float = 0.0, high: float = 1.0) -> np.ndarray:
    """Uniform doubles on ``[low, high)`` for the given trial indices."""
    u = (raw_bits(seed, tag, index) >> np.uint64(11)).astype(np.float64) * _INV_2_53
    if low == 0.0 and high == 1.0:
        return u
    return low + (high - low) * u


class CounterStream:
    """Sequential view over one tagged counter stream.

    Handy where a scalar draw is wanted (``sample_direction_uniform``); the
    n-th call returns exactly ``uniform(seed, tag, n)``.
    """

    def __init__(self, seed: int, tag: str = "default", start: int = 0):
        self.seed = int(seed)
        self.tag = tag
        self.counter = int(start)

    def random(self, size: int | None = None):
        n = 1 if size is None else int(size)
        idx = np.arange(self.counter, self.counter + n, dtype=np.uint64)
        self.counter += n
        out = uniform(self.seed, self.tag, idx)
        return float(out[0]) if size is None else out

    def substream(self, tag: str) -> "CounterStream":
        return CounterStream(self.seed, f"{self.tag}/{tag}")
