"""Platform-independent random numbers and matrix fingerprints.

SplitMix64 (Steele, Lea & Flood 2014 constants) drives every generated fixture:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)

all arithmetic modulo 2**64, with the state initialised to the seed itself.
A double in [0, 1) is (next >> 11) * 2**-53.

Fingerprints are FNV-1a 64 (offset 0xcbf29ce484222325, prime 0x100000001b3)
over the row-major little-endian complex128 bytes of a matrix, i.e. the real
and imaginary float64 of each entry in turn, printed as 16 lowercase hex digits.
"""
from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, low: float = 0.0, high: float = 1.0, size: int | tuple | None = None):
        if size is None:
            return low + (high - low) * self.random()
        shape = (size,) if isinstance(size, int) else tuple(size)
        n = int(np.prod(shape)) if shape else 1
        u = np.array([self.random() for _ in range(n)], dtype=np.float64)
        return (low + (high - low) * u).reshape(shape)

    def complex_uniform(self, shape: tuple[int, int]) -> np.ndarray:
        """Entries re + i im, each uniform on [-1, 1); drawn re, im per entry in row-major order."""
        pairs = self.uniform(-1.0, 1.0, (*shape, 2))
        return pairs[..., 0] + 1j * pairs[..., 1]

    def choice_sign(self) -> float:
        return 1.0 if self.next_u64() >> 63 else -1.0


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK
    return h


def fingerprint(*matrices: np.ndarray) -> str:
    blob = b"".join(np.ascontiguousarray(m, dtype="<c16").tobytes() for m in matrices)
    return format(fnv1a64(blob), "016x")
