"""
Seeded Draws

SplitMix64 stream used for the randomized initial frequency estimates.
The generator is fully specified by its integer recurrence, so a seed
gives the same draws on every platform and numpy version:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

all modulo 2**64.  A uniform draw on [0, 1) keeps the top 53 bits,
u = (z >> 11) * 2**-53, and U[low, high] is low + (high − low)·u.

Example:
    stream = SplitMix64(42)
    stream.uniform(0.0, 1.0, 1)     # [6679422623415661 * 2**-53]
"""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

from .._types import FloatArray
from ..exceptions import ModelValidationError

SEED_BOUND: int = 2**64

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX_1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_2 = np.uint64(0x94D049BB133111EB)

# 2**-53: spacing of the uniform grid on [0, 1).
UNIT_SPACING: float = 1.0 / (1 << 53)


class SplitMix64:
    """Sequential SplitMix64 stream.

    Attributes:
        seed: Initial 64-bit state.
    """

    def __init__(self, seed: int) -> None:
        if isinstance(seed, bool) or not 0 <= int(seed) < SEED_BOUND:
            raise ModelValidationError(
                f"seed must be an integer in [0, 2**64), got {seed}",
                location={"field": "seed"},
            )
        self.seed = int(seed)
        self._state = np.uint64(self.seed)

    def next_raw(self, count: int) -> npt.NDArray[np.uint64]:
        """Next ``count`` 64-bit outputs."""
        steps = np.arange(1, count + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = self._state + steps * GOLDEN_GAMMA
            if count:
                self._state = z[-1]
            z = (z ^ (z >> np.uint64(30))) * _MIX_1
            z = (z ^ (z >> np.uint64(27))) * _MIX_2
            return z ^ (z >> np.uint64(31))

    def unit(self, count: int) -> FloatArray:
        """``count`` draws on [0, 1) from the top 53 bits."""
        return (self.next_raw(count) >> np.uint64(11)).astype(np.float64) * UNIT_SPACING

    def uniform(self, low: float, high: float, count: int) -> FloatArray:
        return low + (high - low) * self.unit(count)
