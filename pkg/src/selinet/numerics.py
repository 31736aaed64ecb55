"""Scalar/vector numeric primitives and the deterministic PRNG.

These define the reference semantics of the package; the batched hot
paths live in :mod:`selinet.kernels` (compiled extension when present).

The PRNG is splitmix64 (Steele, Lea & Flood 2014), fixed by its three
constants below.  The state advances by the 64-bit golden-ratio gamma
on every raw draw, so a vectorized request for n draws is bit-identical
to n scalar draws.  Normals are Box-Muller pairs; every normal consumes
exactly two raw draws so scalar and vector sequences stay aligned.
"""

import numpy as np

from .errors import ArgumentError, DimensionError

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix(z):
    """splitmix64 output function on a uint64 ndarray (wrapping arithmetic)."""
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class Rng:
    """Deterministic 64-bit generator: same seed, same sequence, any platform."""

    def __init__(self, seed):
        self._state = int(seed) & _MASK64

    def _raw(self, n):
        """Next n uint64 outputs as an ndarray."""
        base = np.uint64(self._state) + np.uint64(_GAMMA) * (
            np.arange(1, n + 1, dtype=np.uint64)
        )
        self._state = (self._state + _GAMMA * n) & _MASK64
        return _mix(base)

    def next_u64(self):
        return int(self._raw(1)[0])

    def uniforms(self, n, lo=0.0, hi=1.0):
        """n doubles uniform in [lo, hi)."""
        if lo > hi:
            raise ArgumentError(f"uniform bounds reversed: lo={lo} > hi={hi}")
        u = (self._raw(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return lo + (hi - lo) * u

    def uniform(self, lo=0.0, hi=1.0):
        return float(self.uniforms(1, lo, hi)[0])

    def normals(self, n, mean=0.0, sd=1.0):
        """n doubles ~ N(mean, sd^2); consumes exactly 2n raw draws."""
        raw = self._raw(2 * n)
        # u1 in (0, 1] so log() is safe; u2 in [0, 1)
        u1 = ((raw[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
        u2 = (raw[1::2] >> np.uint64(11)).astype(np.float64) * 2.0**-53
        z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
        return mean + sd * z

    def normal(self, mean=0.0, sd=1.0):
        return float(self.normals(1, mean, sd)[0])

    def below(self, n):
        """Integer in [0, n) via the multiply-shift reduction (Lemire)."""
        if n <= 0:
            raise ArgumentError(f"below() needs n >= 1, got {n}")
        return (self.next_u64() * n) >> 64

    def permutation(self, n):
        """Fisher-Yates permutation of range(n)."""
        idx = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            idx[i], idx[j] = idx[j], idx[i]
        return idx


def affine(W, b, x):
    """y = W @ x + b for a single vector x."""
    W = np.asarray(W)
    b = np.asarray(b)
    x = np.asarray(x)
    if W.ndim != 2 or b.ndim != 1 or x.ndim != 1:
        raise DimensionError(
            f"affine expects matrix/vector/vector, got ndim {W.ndim}/{b.ndim}/{x.ndim}"
        )
    m, n = W.shape
    if b.shape[0] != m or x.shape[0] != n:
        raise DimensionError(
            f"affine shape mismatch: W is {m}x{n}, b has {b.shape[0]}, x has {x.shape[0]}"
        )
    return W @ x + b


def softmax(v):
    """Stable softmax of a vector (max subtraction before exponentiation)."""
    v = np.asarray(v)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError("softmax expects a nonempty 1-d vector")
    e = np.exp(v - np.max(v))
    return e / np.sum(e)


def sigmoid(x):
    """Elementwise logistic function, overflow-safe for any finite input."""
    x = np.asarray(x)
    out = np.empty_like(x, dtype=x.dtype if x.dtype.kind == "f" else np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    if out.ndim == 0:
        return float(out)
    return out


def relu(x):
    """max(0, x) elementwise."""
    x = np.asarray(x)
    out = np.maximum(x, 0)
    if out.ndim == 0:
        return float(out)
    return out
