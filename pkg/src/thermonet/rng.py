"""Portable counter-based random numbers.

Draw ``i`` (zero-based) of stream ``k`` under seed ``s`` is

    key  = mix64(s XOR (k * 0xD1B54A32D192ED03))
    u64  = mix64(key + (i + 1) * 0x9E3779B97F4A7C15)      (mod 2**64)

where ``mix64`` is the SplitMix64 finalizer. Uniform doubles take the top 53
bits, ``u = (u64 >> 11) * 2**-53`` in [0, 1). Standard normals use the cosine
branch of Box-Muller on draws ``2j`` and ``2j + 1``:
``z_j = sqrt(-2 ln(1 - u_2j)) * cos(2 pi u_2j+1)``.

Any language with 64-bit unsigned wrap-around can reproduce the integer
stream bit for bit; normals additionally depend on the platform ``log``,
``sqrt`` and ``cos`` which are correctly rounded on all common libms.
"""

from __future__ import annotations

import numpy as np

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
STREAM_GAMMA = 0xD1B54A32D192ED03
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


def mix64(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= _MASK:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream_key(seed: int, stream: int) -> np.uint64:
    base = (check_seed(seed) ^ ((int(stream) * STREAM_GAMMA) & _MASK)) & _MASK
    return mix64(np.array([base], dtype=np.uint64))[0]


def raw64(seed: int, stream: int, n: int, start: int = 0) -> np.ndarray:
    """``n`` raw 64-bit outputs of a stream, beginning at draw ``start``."""
    key = stream_key(seed, stream)
    counters = np.arange(start + 1, start + n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64(key + counters * GOLDEN_GAMMA)


def uniform(seed: int, stream: int, n: int) -> np.ndarray:
    return (raw64(seed, stream, n) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def normal(seed: int, stream: int, n: int) -> np.ndarray:
    u = uniform(seed, stream, 2 * n)
    return np.sqrt(-2.0 * np.log1p(-u[0::2])) * np.cos(2.0 * np.pi * u[1::2])
