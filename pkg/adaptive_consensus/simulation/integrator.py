"""
Fixed-Step Integrator

Classical fourth-order Runge-Kutta on a flat state vector.  Each stage
derivative is checked for finiteness so a blow-up is reported at the stage
and state component where it first appears.
"""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np

from .._types import FloatArray, RhsFunction
from ..exceptions import IntegrationError, ModelValidationError

logger = logging.getLogger(__name__)

ComponentNamer = Callable[[int], str]


def _component(index: int, describe: ComponentNamer | None) -> str:
    return describe(index) if describe is not None else f"x[{index}]"


def _checked(
    k: FloatArray, t: float, stage: int, describe: ComponentNamer | None
) -> FloatArray:
    if not np.all(np.isfinite(k)):
        index = int(np.flatnonzero(~np.isfinite(k))[0])
        raise IntegrationError(t=t, component=_component(index, describe), stage=stage)
    return k


def rk4_step(
    rhs: RhsFunction,
    state: FloatArray,
    t: float,
    h: float,
    *,
    describe: ComponentNamer | None = None,
) -> FloatArray:
    """Advance ``state`` from ``t`` to ``t + h``.

    Args:
        rhs: Derivative function f(t, x).
        state: Current state.
        t: Current time.
        h: Step size (> 0).
        describe: Maps a flat state index to a readable component name for
            error messages.

    Raises:
        IntegrationError: If any stage derivative is non-finite.
    """
    half = 0.5 * h
    k1 = _checked(rhs(t, state), t, 1, describe)
    k2 = _checked(rhs(t + half, state + half * k1), t + half, 2, describe)
    k3 = _checked(rhs(t + half, state + half * k2), t + half, 3, describe)
    k4 = _checked(rhs(t + h, state + h * k3), t + h, 4, describe)
    return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    rhs: RhsFunction,
    state0: FloatArray,
    h: float,
    steps: int,
    *,
    t0: float = 0.0,
    record_every: int = 1,
    describe: ComponentNamer | None = None,
) -> tuple[FloatArray, FloatArray]:
    """Run ``steps`` RK4 steps, recording every ``record_every`` steps and the last one.

    Step k starts at t0 + k·h (no accumulated time drift).

    Returns:
        Tuple of (times, states) with shapes (K,) and (K, len(state0)).
    """
    if h <= 0 or steps < 0 or record_every < 1:
        raise ModelValidationError(
            f"Invalid integration grid: h={h}, steps={steps}, record_every={record_every}"
        )
    indices = list(range(0, steps + 1, record_every))
    if indices[-1] != steps:
        indices.append(steps)
    times = t0 + h * np.asarray(indices, dtype=float)
    states = np.empty((len(indices), np.size(state0)))
    x = np.array(state0, dtype=float)
    states[0] = x
    slot = 1
    for k in range(steps):
        x = rk4_step(rhs, x, t0 + k * h, h, describe=describe)
        if slot < len(indices) and k + 1 == indices[slot]:
            states[slot] = x
            slot += 1
    logger.debug("Integrated %d steps of h=%g, recorded %d samples", steps, h, len(indices))
    return times, states
