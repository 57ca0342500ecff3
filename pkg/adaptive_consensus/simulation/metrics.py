"""
Run Metrics

Scalar summaries of a recorded run: terminal errors, settling times,
windowed error bounds, Lyapunov monotonicity violations and the residual
of the closed-loop error identity.  Acceptance verdicts are computed from
these numbers alone.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .._types import FloatArray
from .trajectory import Trajectory

logger = logging.getLogger(__name__)

# Allowed per-sample increase of a Lyapunov function.
LYAPUNOV_SLACK: float = 1e-8


@dataclass(frozen=True, slots=True)
class SettlingThresholds:
    """Error levels used for settling times (∞-norms)."""

    position: float = 1e-2
    velocity: float = 5e-2
    eta: float = 1e-2
    omega: float = 5e-2


@dataclass(frozen=True, slots=True)
class MetricWindows:
    """Trailing fractions of the horizon over which errors are bounded.

    Attributes:
        terminal_fraction: Window for the terminal errors.
        observer_fraction: Window for the observer convergence bound.
        tracking_fraction: Window for the tracking bounds.
        average_bin: Bin width (s) of the frequency-error averages.
        average_span: Trailing span (s) covered by those averages.
    """

    terminal_fraction: float = 0.1
    observer_fraction: float = 1.0 / 3.0
    tracking_fraction: float = 1.0 / 6.0
    average_bin: float = 1.0
    average_span: float = 10.0


@dataclass(frozen=True, slots=True)
class AgentMetrics:
    """Per-follower summary; plant fields are ``None`` in observer-only runs."""

    agent: int
    terminal_eta_error: float
    terminal_omega_error: float
    final_omega_error: float
    terminal_omega_rate: float
    observer_window_eta_error: float
    settling_eta: float | None
    settling_omega: float | None
    terminal_position_error: float | None = None
    terminal_velocity_error: float | None = None
    tracking_window_position_error: float | None = None
    tracking_window_velocity_error: float | None = None
    settling_position: float | None = None
    settling_velocity: float | None = None
    lyapunov_violations: int = 0

    def to_dict(self) -> dict[str, float | int | None]:
        return {
            "agent": self.agent,
            "terminal_position_error": self.terminal_position_error,
            "terminal_velocity_error": self.terminal_velocity_error,
            "terminal_eta_error": self.terminal_eta_error,
            "terminal_omega_error": self.terminal_omega_error,
            "final_omega_error": self.final_omega_error,
            "terminal_omega_rate": self.terminal_omega_rate,
            "observer_window_eta_error": self.observer_window_eta_error,
            "tracking_window_position_error": self.tracking_window_position_error,
            "tracking_window_velocity_error": self.tracking_window_velocity_error,
            "settling_position": self.settling_position,
            "settling_velocity": self.settling_velocity,
            "settling_eta": self.settling_eta,
            "settling_omega": self.settling_omega,
            "lyapunov_violations": self.lyapunov_violations,
        }


@dataclass(frozen=True, slots=True)
class RunMetrics:
    """Summary of one run.

    Attributes:
        agents: Per-follower metrics in agent order.
        observer_lyapunov_violations: Samples where observer V increased by
            more than ``LYAPUNOV_SLACK``.
        max_identity_residual: Largest finite closed-loop error-identity
            residual over the tracking window, ``None`` without plants.
        omega_error_averages: Bin means of max_i ‖ω̃_i‖∞ over the trailing
            averaging span, oldest first.
        record_interval: Spacing (s) of the recorded samples; the residual
            tolerance scales with its fourth power.
        windows: Windows the metrics were computed with.
    """

    agents: tuple[AgentMetrics, ...]
    observer_lyapunov_violations: int
    max_identity_residual: float | None
    omega_error_averages: tuple[float, ...]
    record_interval: float = 0.0
    windows: MetricWindows = field(default_factory=MetricWindows)

    @property
    def lyapunov_violation_count(self) -> int:
        return self.observer_lyapunov_violations + sum(a.lyapunov_violations for a in self.agents)

    @property
    def terminal_omega_rate(self) -> float:
        return max(a.terminal_omega_rate for a in self.agents)

    def to_dict(self) -> dict[str, object]:
        return {
            "agents": [a.to_dict() for a in self.agents],
            "observer_lyapunov_violations": self.observer_lyapunov_violations,
            "lyapunov_violation_count": self.lyapunov_violation_count,
            "max_identity_residual": self.max_identity_residual,
            "terminal_omega_rate": self.terminal_omega_rate,
            "omega_error_averages": list(self.omega_error_averages),
            "record_interval": self.record_interval,
        }


def trailing_mask(times: FloatArray, fraction: float) -> FloatArray:
    """Samples with t >= t_end − fraction·(t_end − t_start); never empty."""
    start = times[-1] - fraction * (times[-1] - times[0])
    return times >= start - 1e-12 * max(1.0, abs(times[-1]))


def settling_time(times: FloatArray, errors: FloatArray, threshold: float) -> float | None:
    """First time after which ``errors`` stays below ``threshold``; ``None`` if never."""
    above = np.flatnonzero(errors >= threshold)
    if above.size == 0:
        return float(times[0])
    last = int(above[-1])
    return None if last == times.size - 1 else float(times[last + 1])


def lyapunov_violations(series: FloatArray, slack: float = LYAPUNOV_SLACK) -> FloatArray:
    """Count of sample-to-sample increases larger than ``slack`` along axis 0."""
    return np.count_nonzero(np.diff(series, axis=0) > slack, axis=0)


def _window_max(values: FloatArray) -> float:
    finite = values[np.isfinite(values)]
    return float(np.max(finite)) if finite.size else 0.0


def binned_averages(
    times: FloatArray, values: FloatArray, bin_width: float, span: float
) -> tuple[float, ...]:
    """Means of ``values`` over consecutive bins covering the trailing ``span``.

    The final sample is folded into the last bin.
    """
    start = max(float(times[0]), float(times[-1]) - span)
    count = max(1, int(math.floor((times[-1] - start) / bin_width + 1e-9)))
    start = float(times[-1]) - count * bin_width
    selected = times >= start - 1e-9
    index = np.minimum(
        np.floor((times[selected] - start) / bin_width + 1e-9).astype(int), count - 1
    )
    sums = np.bincount(index, weights=values[selected], minlength=count)
    counts = np.bincount(index, minlength=count)
    return tuple(float(s / c) for s, c in zip(sums, counts) if c > 0)


def compute_metrics(
    trajectory: Trajectory,
    settling: SettlingThresholds | None = None,
    windows: MetricWindows | None = None,
) -> RunMetrics:
    """Reduce a trajectory to :class:`RunMetrics`."""
    settling = settling or SettlingThresholds()
    windows = windows or MetricWindows()
    times = trajectory.times
    terminal = trailing_mask(times, windows.terminal_fraction)
    observer_window = trailing_mask(times, windows.observer_fraction)
    tracking_window = trailing_mask(times, windows.tracking_fraction)

    eta_err = trajectory.eta_tilde_norm
    omega_err = trajectory.omega_tilde_norm
    omega_rate = np.linalg.norm(trajectory.omega_hat_dot, axis=-1)
    pos_err = trajectory.position_error
    vel_err = trajectory.velocity_error
    agent_violations = (
        lyapunov_violations(trajectory.agent_lyapunov)
        if trajectory.agent_lyapunov is not None
        else np.zeros(trajectory.follower_count, dtype=int)
    )

    agents = []
    for i in range(trajectory.follower_count):
        plant_fields: dict[str, float | None] = {}
        if pos_err is not None and vel_err is not None:
            plant_fields = {
                "terminal_position_error": float(np.max(pos_err[terminal, i])),
                "terminal_velocity_error": float(np.max(vel_err[terminal, i])),
                "tracking_window_position_error": float(np.max(pos_err[tracking_window, i])),
                "tracking_window_velocity_error": float(np.max(vel_err[tracking_window, i])),
                "settling_position": settling_time(times, pos_err[:, i], settling.position),
                "settling_velocity": settling_time(times, vel_err[:, i], settling.velocity),
            }
        agents.append(
            AgentMetrics(
                agent=i + 1,
                terminal_eta_error=float(np.max(eta_err[terminal, i])),
                terminal_omega_error=float(np.max(omega_err[terminal, i])),
                final_omega_error=float(omega_err[-1, i]),
                terminal_omega_rate=float(np.max(omega_rate[terminal, i])),
                observer_window_eta_error=float(np.max(eta_err[observer_window, i])),
                settling_eta=settling_time(times, eta_err[:, i], settling.eta),
                settling_omega=settling_time(times, omega_err[:, i], settling.omega),
                lyapunov_violations=int(agent_violations[i]),
                **plant_fields,
            )
        )

    residual = (
        _window_max(trajectory.identity_residual[tracking_window])
        if trajectory.identity_residual is not None
        else None
    )
    metrics = RunMetrics(
        agents=tuple(agents),
        observer_lyapunov_violations=int(lyapunov_violations(trajectory.observer_lyapunov)),
        max_identity_residual=residual,
        omega_error_averages=binned_averages(
            times, np.max(omega_err, axis=1), windows.average_bin, windows.average_span
        ),
        record_interval=float(times[1] - times[0]) if times.size > 1 else 0.0,
        windows=windows,
    )
    logger.debug(
        "Metrics: %d Lyapunov violations, max residual %s",
        metrics.lyapunov_violation_count,
        residual,
    )
    return metrics
