"""
Adaptive Consensus -- Shared Type Definitions

Protocol types for follower plants, the right-hand-side callable contract
of the integrator, and the result record shared by the standing-assumption
checks. Uses structural subtyping so any object with matching shape
satisfies the plant contract without inheritance.

This is a leaf module apart from the error codes it reports.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np
import numpy.typing as npt

from .errors import ErrorCode

FloatArray = npt.NDArray[np.float64]

# Canonical type alias for stacked-state derivative functions f(t, x)
RhsFunction = Callable[[float, FloatArray], FloatArray]


@runtime_checkable
class EulerLagrangePlant(Protocol):
    """Structural match for a follower with dynamics M(q)q̈ + C(q,q̇)q̇ + G(q) = τ.

    Every method accepts arrays with arbitrary leading batch axes so one
    plant object can evaluate all agents of a network at once; ``theta``
    carries the per-agent physical parameter vector.
    """

    @property
    def dof(self) -> int: ...

    @property
    def param_dim(self) -> int: ...

    def mass_matrix(self, q: FloatArray, theta: FloatArray) -> FloatArray: ...

    def coriolis_matrix(
        self, q: FloatArray, q_dot: FloatArray, theta: FloatArray
    ) -> FloatArray: ...

    def gravity_vector(self, q: FloatArray, theta: FloatArray) -> FloatArray: ...

    def regressor(
        self, q: FloatArray, q_dot: FloatArray, a: FloatArray, b: FloatArray
    ) -> FloatArray: ...

    def accel(
        self, q: FloatArray, q_dot: FloatArray, tau: FloatArray, theta: FloatArray
    ) -> FloatArray: ...


@dataclass(frozen=True, slots=True)
class AssumptionCheck:
    """Outcome of a standing-assumption check.

    Truthy iff the assumption holds; ``violation`` names the first failed
    condition when it does not.
    """

    holds: bool
    diagnostic: str
    violation: ErrorCode | None = None

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict[str, object]:
        """Serialize to a plain dict for JSON export."""
        return {
            "holds": self.holds,
            "diagnostic": self.diagnostic,
            "violation": self.violation.value if self.violation else None,
        }
