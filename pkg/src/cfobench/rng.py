"""Seedable uniform stream and the Box-Muller normal deviate built on it.

The uniform generator is SplitMix64: state advances by the 64-bit golden
ratio constant and each output is a finalizer hash of the new state. It is
tiny, fast, passes BigCrush, and the whole stream is reproducible from one
64-bit seed, which is what the run-record determinism guarantee rests on.
Reference vector (seed 1234567): 6457827717110365317, 3203168211198807973,
9817491932198370423.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2_53 = 2.0 ** -53


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """64-bit seedable uniform generator with a counter-based batch mode."""

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        return _mix(self.state)

    def next_float(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV_2_53

    def uniform_batch(self, n: int) -> np.ndarray:
        """n uniforms identical to n successive next_float() calls.

        The state jump is closed-form (state + k * golden), so the batch is
        computed counter-style in numpy without a Python loop.
        """
        if n <= 0:
            return np.empty(0)
        idx = np.arange(1, n + 1, dtype=np.uint64)
        z = (np.uint64(self.state) + idx * np.uint64(_GOLDEN))
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
        self.state = (self.state + n * _GOLDEN) & _MASK
        return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53


def box_muller(mu: float, sigma: float, s: float, t: float) -> float:
    """One normal deviate from two uniforms, cosine branch.

    z = mu + sigma * sqrt(-2 ln s) * cos(2 pi t), with s in (0, 1].
    """
    if not 0.0 < s <= 1.0:
        raise ValueError("s must lie in (0, 1]")
    return mu + sigma * math.sqrt(-2.0 * math.log(s)) * math.cos(2.0 * math.pi * t)


@dataclass
class NoiseState:
    """Gaussian noise source: mean, standard deviation, and its own stream.

    The 0.4472 default standard deviation gives variance 0.19998784, the
    0.2-variance additive-noise setting used by the noisy array benchmark.
    """

    mu: float = 0.0
    sigma: float = 0.4472
    rng: SplitMix64 = field(default_factory=lambda: SplitMix64(0))

    @classmethod
    def seeded(cls, seed: int, mu: float = 0.0, sigma: float = 0.4472) -> "NoiseState":
        return cls(mu=mu, sigma=sigma, rng=SplitMix64(seed))


def gaussian_deviate(state: NoiseState) -> float:
    """Draw one deviate, advancing the stream by two uniforms.

    A zero first uniform would send log() to -inf, so the pair is redrawn in
    that (probability 2^-53) case.
    """
    while True:
        s = state.rng.next_float()
        t = state.rng.next_float()
        if s > 0.0:
            return box_muller(state.mu, state.sigma, s, t)


def gaussian_batch(state: NoiseState, n: int) -> np.ndarray:
    """n deviates consuming the same uniforms as n gaussian_deviate() calls.

    The stream position afterwards is identical to the scalar path, and the
    values agree to the last bit or two (numpy's vectorized log/cos may land
    one ulp away from libm's). Per-evaluation noise inside runs always goes
    through gaussian_deviate, so run records never depend on the difference;
    this entry point is for bulk statistics.

    Falls back to the scalar path if the batch happens to contain a zero
    uniform in an s position, preserving the redraw semantics.
    """
    if n <= 0:
        return np.empty(0)
    start_state = state.rng.state
    u = state.rng.uniform_batch(2 * n)
    s = u[0::2]
    t = u[1::2]
    if np.any(s == 0.0):
        state.rng.state = start_state
        return np.array([gaussian_deviate(state) for _ in range(n)])
    return state.mu + state.sigma * np.sqrt(-2.0 * np.log(s)) * np.cos(2.0 * np.pi * t)


def clock_seed() -> int:
    """Wall-clock seed for runs that deliberately opt out of reproducibility."""
    return time.time_ns() & _MASK
