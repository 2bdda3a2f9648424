"""Deterministic counter-based random streams.

All randomness in the package flows through SplitMix64, used as a pure
counter-based generator: output k of the stream with seed ``s`` is

    mix64(s + (k + 1) * 0x9E3779B97F4A7C15)

where ``mix64`` is the finalizer

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

with all arithmetic modulo 2^64.  This is exactly the splitmix64 stream, so
any implementation in any language can reproduce the raw word sequence.
Reference vectors (first outputs):

    seed 0  : 0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F
    seed 42 : 0xBDD732262FEB6E95, 0x28EFE333B266F103, 0x47526757130F9F52

Floats are derived as uniform = word * 2^-64 in [0, 1); standard normals by
the Box-Muller transform applied to consecutive uniform pairs (the first
uniform is flipped to (0, 1] to keep log() finite).
"""

from __future__ import annotations

import numpy as np

_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TWO64 = 2.0 ** 64


def splitmix64(seed: int, start: int, count: int) -> np.ndarray:
    """Words start..start+count-1 of the splitmix64 stream for ``seed``."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx * np.uint64(_GOLDEN)) & _MASK
        z = ((z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)) & _MASK
        z = ((z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)) & _MASK
        z = z ^ (z >> np.uint64(31))
    return z


class CounterRng:
    """Stateful cursor over the splitmix64 stream of one seed.

    The cursor only advances; two CounterRng objects with the same seed
    produce identical sequences regardless of platform or call batching.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._pos = 0

    def words(self, count: int) -> np.ndarray:
        out = splitmix64(self.seed, self._pos, count)
        self._pos += count
        return out

    def uniform(self, count: int) -> np.ndarray:
        """Uniform doubles in [0, 1)."""
        return self.words(count).astype(np.float64) / _TWO64

    def normal(self, count: int) -> np.ndarray:
        """Standard normal doubles via Box-Muller on uniform pairs."""
        n_pairs = (count + 1) // 2
        u = self.uniform(2 * n_pairs)
        u1 = 1.0 - u[0::2]  # in (0, 1], keeps log finite
        u2 = u[1::2]
        r = np.sqrt(-2.0 * np.log(u1))
        out = np.empty(2 * n_pairs)
        out[0::2] = r * np.cos(2.0 * np.pi * u2)
        out[1::2] = r * np.sin(2.0 * np.pi * u2)
        return out[:count]

    def complex_normal(self, shape) -> np.ndarray:
        """Complex standard normals, unit variance per entry."""
        n = int(np.prod(shape))
        g = self.normal(2 * n)
        z = (g[:n] + 1j * g[n:]) / np.sqrt(2.0)
        return z.reshape(shape)

    def complex_matrix(self, rows: int, cols: int, scale: float = 1.0) -> np.ndarray:
        return scale * self.complex_normal((rows, cols))

    def hermitian(self, dim: int, scale: float = 1.0) -> np.ndarray:
        g = self.complex_normal((dim, dim))
        return scale * 0.5 * (g + g.conj().T)

    def unitary(self, dim: int) -> np.ndarray:
        """Haar-like unitary from Gram-Schmidt on a complex Gaussian matrix."""
        g = self.complex_normal((dim, dim))
        q = np.empty_like(g)
        for j in range(dim):
            v = g[:, j].copy()
            for k in range(j):
                v -= (q[:, k].conj() @ v) * q[:, k]
            # re-orthogonalize once for numerical safety
            for k in range(j):
                v -= (q[:, k].conj() @ v) * q[:, k]
            q[:, j] = v / np.linalg.norm(v)
        return q

    def vector(self, dim: int) -> np.ndarray:
        return self.complex_normal((dim,))

    def unit_vector(self, dim: int) -> np.ndarray:
        v = self.complex_normal((dim,))
        return v / np.linalg.norm(v)

    def integers(self, low: int, high: int, count: int) -> np.ndarray:
        """Integers in [low, high) by modular reduction (bias < 2^-50 for desk ranges)."""
        span = np.uint64(high - low)
        return (low + (self.words(count) % span).astype(np.int64)).astype(np.int64)
