"""
Persistent Excitation

Sliding-window Gram test: a signal f is PE on windows of length T0 when
(1/T0)∫_t^{t+T0} f fᵀ ds ≥ εI for every window start t ≥ t0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .._types import FloatArray
from ..errors import ErrorCode
from ..exceptions import SamplingError
from .leader import LeaderModel, leader_trajectory

logger = logging.getLogger(__name__)

# Allowed deviation of any sampling interval from the mean interval (s).
SAMPLING_JITTER: float = 1e-9

# Floor for the relative default threshold so a zero signal is never PE.
EPSILON_FLOOR: float = 1e-12


@dataclass(frozen=True, slots=True)
class PEReport:
    """Result of a windowed Gram test.

    Attributes:
        window: Window length T0 (s).
        offset: Earliest window start t0 (s).
        epsilon: Threshold ε.
        min_gram_eig: Minimum over windows of the Gram's smallest eigenvalue.
        is_pe: ``min_gram_eig >= epsilon``.
        worst_window_start: Start time of the window attaining the minimum.
        window_count: Number of windows evaluated.
    """

    window: float
    offset: float
    epsilon: float
    min_gram_eig: float
    is_pe: bool
    worst_window_start: float
    window_count: int

    def to_dict(self) -> dict[str, float | bool | int]:
        """Serialize to a plain dict for JSON export."""
        return {
            "window": self.window,
            "offset": self.offset,
            "epsilon": self.epsilon,
            "min_gram_eig": self.min_gram_eig,
            "is_pe": self.is_pe,
            "worst_window_start": self.worst_window_start,
            "window_count": self.window_count,
        }


def default_pe_epsilon(samples: FloatArray) -> float:
    """ε = 0.1·mean(f²), floored so that an all-zero signal fails."""
    return max(0.1 * float(np.mean(np.square(samples))), EPSILON_FLOOR)


def pe_gram(
    times: FloatArray,
    samples: FloatArray,
    window: float,
    offset: float = 0.0,
    epsilon: float | None = None,
) -> PEReport:
    """Windowed Gram test with trapezoid quadrature, stride one sample.

    Args:
        times: Uniformly spaced sample times, shape (K,).
        samples: Signal values, shape (K,) or (K, d).
        window: Window length T0 (s).
        offset: Earliest window start t0 (s).
        epsilon: Threshold; defaults to :func:`default_pe_epsilon`.

    Raises:
        SamplingError: Too few samples (the record must cover
            [t0, t0 + 2·T0]) or non-uniform spacing.
    """
    times = np.asarray(times, dtype=float).ravel()
    f = np.asarray(samples, dtype=float)
    if f.ndim == 1:
        f = f[:, None]
    if times.size < 3 or f.shape[0] != times.size:
        raise SamplingError(
            f"Need at least 3 samples with matching times, got {times.size} times "
            f"and {f.shape[0]} samples",
            code=ErrorCode.INSUFFICIENT_SAMPLES,
        )
    if window <= 0:
        raise SamplingError(f"Window must be positive, got {window}")
    intervals = np.diff(times)
    dt = float(intervals.mean())
    if dt <= 0 or float(np.max(np.abs(intervals - dt))) > SAMPLING_JITTER:
        raise SamplingError(
            "Samples must be uniformly spaced",
            code=ErrorCode.NONUNIFORM_SAMPLING,
            location={"max_jitter": float(np.max(np.abs(intervals - dt)))},
        )
    if times[0] > offset + SAMPLING_JITTER or times[-1] < offset + 2 * window - SAMPLING_JITTER:
        raise SamplingError(
            f"Samples span [{times[0]:.6g}, {times[-1]:.6g}] s but the test needs "
            f"[{offset:.6g}, {offset + 2 * window:.6g}] s",
            code=ErrorCode.INSUFFICIENT_SAMPLES,
        )

    width = max(1, int(round(window / dt)))
    outer = np.einsum("ki,kj->kij", f, f)
    running = cumulative_trapezoid(outer, dx=dt, axis=0, initial=0.0)
    first = int(np.searchsorted(times, offset - SAMPLING_JITTER))
    starts = np.arange(first, times.size - width)
    grams = (running[starts + width] - running[starts]) / (width * dt)
    smallest = np.linalg.eigvalsh(grams)[:, 0]
    worst = int(np.argmin(smallest))

    eps = default_pe_epsilon(f) if epsilon is None else float(epsilon)
    min_eig = float(smallest[worst])
    logger.debug(
        "PE Gram over %d windows of %d samples: min eigenvalue %.3e (eps %.3e)",
        starts.size,
        width,
        min_eig,
        eps,
    )
    return PEReport(
        window=float(window),
        offset=float(offset),
        epsilon=eps,
        min_gram_eig=min_eig,
        is_pe=min_eig >= eps,
        worst_window_start=float(times[starts[worst]]),
        window_count=int(starts.size),
    )


def default_pe_window(model: LeaderModel) -> float:
    """One period of the slowest leader mode, 2π / min(ω)."""
    return 2.0 * math.pi / float(np.min(model.omega))


def leader_pe_report(
    model: LeaderModel,
    window: float | None = None,
    offset: float = 0.0,
    epsilon: float | None = None,
    step: float = 1e-3,
) -> PEReport:
    """PE test of the leader state sampled in closed form over [0, t0 + 2·T0]."""
    window = default_pe_window(model) if window is None else float(window)
    count = int(math.ceil((offset + 2.0 * window) / step)) + 1
    times = np.arange(count) * step
    return pe_gram(times, leader_trajectory(model, times), window, offset, epsilon)
