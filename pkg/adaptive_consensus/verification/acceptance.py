"""
Acceptance Checks

Turns :class:`~adaptive_consensus.simulation.metrics.RunMetrics` into
pass / fail / indeterminate verdicts against calibrated finite-time
thresholds, and assembles the run summary written next to the CSVs.

Checks:
    observer_convergence   max_i ‖η_i − v‖∞ over the observer window
    frequency_learning     max_i ‖ω_i(T) − ω‖∞ and non-increasing 1 s averages
                           (indeterminate when the leader is not exciting)
    tracking_position      max_i ‖q_i − q0‖∞ over the tracking window
    tracking_velocity      max_i ‖q̇_i − q̇0‖∞ over the tracking window
    lyapunov_monotonicity  observer V and every V_i non-increasing per sample
    error_identity         closed-loop error identity residual, ė by central differences
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from .._types import AssumptionCheck
from ..models.excitation import PEReport, leader_pe_report
from ..simulation.engine import run_scenario
from ..simulation.metrics import MetricWindows, RunMetrics
from ..simulation.scenario import Scenario
from ..simulation.trajectory import Trajectory

logger = logging.getLogger(__name__)


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True, slots=True)
class AcceptanceThresholds:
    """Calibrated finite-time bounds (the asymptotic limits are all zero)."""

    eta_error: float = 1e-2
    omega_error: float = 5e-2
    position_error: float = 1e-2
    velocity_error: float = 5e-2
    identity_residual_coefficient: float = 1e2
    identity_residual_floor: float = 1e-9
    monotone_slack: float = 1e-9
    observer_fraction: float = 1.0 / 3.0
    tracking_fraction: float = 1.0 / 6.0
    average_bin: float = 1.0
    average_span: float = 10.0

    def identity_tolerance(self, record_interval: float) -> float:
        """Residual bound for ė taken by central differences at ``record_interval``."""
        scaled = self.identity_residual_coefficient * record_interval**4
        return self.identity_residual_floor + scaled

    @property
    def windows(self) -> MetricWindows:
        return MetricWindows(
            observer_fraction=self.observer_fraction,
            tracking_fraction=self.tracking_fraction,
            average_bin=self.average_bin,
            average_span=self.average_span,
        )

    def to_dict(self) -> dict[str, float]:
        return {
            "eta_error": self.eta_error,
            "omega_error": self.omega_error,
            "position_error": self.position_error,
            "velocity_error": self.velocity_error,
            "identity_residual_coefficient": self.identity_residual_coefficient,
            "identity_residual_floor": self.identity_residual_floor,
            "observer_fraction": self.observer_fraction,
            "tracking_fraction": self.tracking_fraction,
        }


@dataclass(frozen=True, slots=True)
class CheckResult:
    name: str
    status: CheckStatus
    value: float | None
    threshold: float | None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status.value,
            "value": self.value,
            "threshold": self.threshold,
            "detail": self.detail,
        }


def _bound_check(name: str, value: float, threshold: float, what: str) -> CheckResult:
    status = CheckStatus.PASS if value < threshold else CheckStatus.FAIL
    return CheckResult(name, status, value, threshold, f"{what}: {value:.3e} (< {threshold:g})")


def is_non_increasing(values: tuple[float, ...] | list[float], slack: float) -> bool:
    return bool(np.all(np.diff(np.asarray(values, dtype=float)) <= slack))


def evaluate_checks(
    metrics: RunMetrics,
    thresholds: AcceptanceThresholds,
    leader_excited: bool,
) -> list[CheckResult]:
    """Verdicts derived from ``metrics`` and ``thresholds`` only."""
    agents = metrics.agents
    results = [
        _bound_check(
            "observer_convergence",
            max(a.observer_window_eta_error for a in agents),
            thresholds.eta_error,
            "max leader-state estimation error over the observer window",
        )
    ]

    omega_final = max(a.final_omega_error for a in agents)
    monotone = is_non_increasing(metrics.omega_error_averages, thresholds.monotone_slack)
    if not leader_excited:
        results.append(
            CheckResult(
                "frequency_learning",
                CheckStatus.INDETERMINATE,
                omega_final,
                thresholds.omega_error,
                "leader is not persistently exciting; frequency convergence is not implied",
            )
        )
    else:
        passed = omega_final < thresholds.omega_error and monotone
        results.append(
            CheckResult(
                "frequency_learning",
                CheckStatus.PASS if passed else CheckStatus.FAIL,
                omega_final,
                thresholds.omega_error,
                f"final frequency error {omega_final:.3e}; 1 s averages "
                f"{'non-increasing' if monotone else 'not monotone'}",
            )
        )

    if agents and agents[0].tracking_window_position_error is not None:
        results.append(
            _bound_check(
                "tracking_position",
                max(a.tracking_window_position_error or 0.0 for a in agents),
                thresholds.position_error,
                "max position tracking error over the tracking window",
            )
        )
        results.append(
            _bound_check(
                "tracking_velocity",
                max(a.tracking_window_velocity_error or 0.0 for a in agents),
                thresholds.velocity_error,
                "max velocity tracking error over the tracking window",
            )
        )

    violations = metrics.lyapunov_violation_count
    results.append(
        CheckResult(
            "lyapunov_monotonicity",
            CheckStatus.PASS if violations == 0 else CheckStatus.FAIL,
            float(violations),
            0.0,
            f"{violations} per-sample increases beyond slack",
        )
    )

    if metrics.max_identity_residual is not None:
        residual = metrics.max_identity_residual
        tolerance = thresholds.identity_tolerance(metrics.record_interval)
        status = CheckStatus.PASS if residual <= tolerance else CheckStatus.FAIL
        results.append(
            CheckResult(
                "error_identity",
                status,
                residual,
                tolerance,
                f"max closed-loop error identity residual {residual:.3e} "
                f"over the tracking window (sampled every {metrics.record_interval:g} s)",
            )
        )
    return results


@dataclass(frozen=True)
class RunSummary:
    """Everything ``summary.json`` holds."""

    scenario: dict[str, Any]
    metrics: RunMetrics
    pe_report: PEReport
    leader_assumption: AssumptionCheck
    graph_assumption: AssumptionCheck
    checks: list[CheckResult] = field(default_factory=list)
    thresholds: AcceptanceThresholds = field(default_factory=AcceptanceThresholds)

    @property
    def passed(self) -> bool:
        return all(check.status is not CheckStatus.FAIL for check in self.checks)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "verdict": self.verdict,
            "checks": [check.to_dict() for check in self.checks],
            "metrics": self.metrics.to_dict(),
            "leader_pe": self.pe_report.to_dict(),
            "assumptions": {
                "graph": self.graph_assumption.to_dict(),
                "leader": self.leader_assumption.to_dict(),
            },
            "thresholds": self.thresholds.to_dict(),
        }


def summarize_run(
    scenario: Scenario,
    metrics: RunMetrics,
    thresholds: AcceptanceThresholds | None = None,
    pe_report: PEReport | None = None,
) -> RunSummary:
    thresholds = thresholds or AcceptanceThresholds()
    pe_report = pe_report or leader_pe_report(scenario.leader)
    leader_check = scenario.leader_assumption
    settings = scenario.integration
    return RunSummary(
        scenario={
            "seed": int(scenario.seed),
            "h": settings.h,
            "T": settings.T,
            "record_every": settings.record_every,
            "followers": scenario.follower_count,
            "mode": scenario.mode.value,
        },
        metrics=metrics,
        pe_report=pe_report,
        leader_assumption=leader_check,
        graph_assumption=scenario.graph.assumption1,
        checks=evaluate_checks(metrics, thresholds, leader_check.holds and pe_report.is_pe),
        thresholds=thresholds,
    )


def verify_scenario(
    scenario: Scenario, thresholds: AcceptanceThresholds | None = None
) -> tuple[RunSummary, Trajectory]:
    """Run ``scenario`` and evaluate every applicable acceptance check."""
    thresholds = thresholds or AcceptanceThresholds()
    trajectory, metrics = run_scenario(scenario, windows=thresholds.windows)
    summary = summarize_run(scenario, metrics, thresholds)
    logger.info(
        "Verification of %s scenario: %s",
        scenario.mode.value,
        summary.verdict,
    )
    return summary, trajectory


def format_check_table(checks: list[CheckResult]) -> str:
    """Fixed-width table of check results."""
    rows = [f"{'check':<24} {'status':<14} {'value':>12} {'threshold':>12}"]
    for check in checks:
        value = "-" if check.value is None else f"{check.value:.3e}"
        threshold = "-" if check.threshold is None else f"{check.threshold:.3e}"
        rows.append(
            f"{check.name:<24} {check.status.value.upper():<14} {value:>12} {threshold:>12}"
        )
    return "\n".join(rows)

