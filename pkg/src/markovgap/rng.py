"""Deterministic random streams built on the SplitMix64 mixer.

The generator is counter based so that any sample can be regenerated from
``(seed, index)`` without replaying the stream:

    output_n = mix64(seed + (n + 1) * GOLDEN)          (all in uint64)
    mix64(z) = h(h(z ^ (z >> 30)) ...)  with
        z ^= z >> 30;  z *= 0xBF58476D1CE4B9B1
        z ^= z >> 27;  z *= 0x94D049BB133111EB
        z ^= z >> 31

Uniform doubles take the top 53 bits, ``u = (output >> 11) * 2**-53``.
Gaussians come from Box-Muller on consecutive uniform pairs, with the first
uniform shifted into (0, 1] so the logarithm is finite.  Child seeds are
``derive(seed, k) = mix64(seed ^ ((k + 1) * GOLDEN))``.
"""

from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4B9B1)
_MIX_B = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64(0xFFFFFFFFFFFFFFFF)

_TWO_NEG_53 = 2.0**-53


def mix64(z: np.ndarray | int) -> np.ndarray:
    """SplitMix64 output function, vectorized over uint64 arrays."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _MIX_A
        z = (z ^ (z >> np.uint64(27))) * _MIX_B
        return z ^ (z >> np.uint64(31))


def derive(seed: int, k: int) -> int:
    """Child seed ``k`` of ``seed``; used for restarts and per-sample streams."""
    with np.errstate(over="ignore"):
        child = mix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) ^ (np.uint64(k + 1) * GOLDEN))
    return int(child)


class SplitMix64:
    """Counter-based SplitMix64 stream of uniforms, Gaussians and integers."""

    def __init__(self, seed: int):
        self._seed = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
        self._count = 0

    @property
    def seed(self) -> int:
        return int(self._seed)

    def raw(self, n: int) -> np.ndarray:
        """Next ``n`` raw uint64 outputs."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        idx = np.arange(self._count + 1, self._count + n + 1, dtype=np.uint64)
        self._count += n
        with np.errstate(over="ignore"):
            return mix64(self._seed + idx * GOLDEN)

    def uniforms(self, n: int) -> np.ndarray:
        """``n`` doubles uniform on [0, 1)."""
        return (self.raw(n) >> np.uint64(11)).astype(np.float64) * _TWO_NEG_53

    def gaussians(self, n: int) -> np.ndarray:
        """``n`` standard normal doubles via Box-Muller."""
        m = (n + 1) // 2
        # first uniform in (0, 1] so log never sees zero
        u1 = ((self.raw(m) >> np.uint64(11)).astype(np.float64) + 1.0) * _TWO_NEG_53
        u2 = self.uniforms(m)
        r = np.sqrt(-2.0 * np.log(u1))
        out = np.empty(2 * m)
        out[0::2] = r * np.cos(2.0 * np.pi * u2)
        out[1::2] = r * np.sin(2.0 * np.pi * u2)
        return out[:n]

    def complex_gaussians(self, shape: tuple[int, ...] | int) -> np.ndarray:
        """Complex array with independent N(0,1) real and imaginary parts."""
        if isinstance(shape, int):
            shape = (shape,)
        n = int(np.prod(shape)) if shape else 1
        g = self.gaussians(2 * n)
        return (g[:n] + 1j * g[n:]).reshape(shape)

    def integers(self, n: int, bound: int) -> np.ndarray:
        """``n`` integers uniform on [0, bound)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return np.minimum((self.uniforms(n) * bound).astype(np.int64), bound - 1)

    def permutation(self, n: int) -> np.ndarray:
        """Random permutation of range(n), by argsort of fresh uniforms."""
        return np.argsort(self.uniforms(n), kind="stable")


def haar_unitary(d: int, rng: SplitMix64) -> np.ndarray:
    """Haar-distributed d x d unitary: QR of a complex Gaussian matrix with
    the R diagonal rephased to be positive."""
    g = rng.complex_gaussians((d, d))
    q, r = np.linalg.qr(g)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases
