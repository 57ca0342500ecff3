"""Tests for acceptance verdicts computed from run metrics."""

from __future__ import annotations

from dataclasses import replace

import pytest

from adaptive_consensus.simulation.metrics import AgentMetrics, RunMetrics
from adaptive_consensus.simulation.scenario import Scenario
from adaptive_consensus.verification.acceptance import (
    AcceptanceThresholds,
    CheckStatus,
    evaluate_checks,
    format_check_table,
    is_non_increasing,
    summarize_run,
)

GOOD_AGENT = AgentMetrics(
    agent=1,
    terminal_eta_error=1e-4,
    terminal_omega_error=1e-3,
    final_omega_error=1e-3,
    terminal_omega_rate=1e-3,
    observer_window_eta_error=1e-3,
    settling_eta=5.0,
    settling_omega=12.0,
    terminal_position_error=1e-4,
    terminal_velocity_error=1e-3,
    tracking_window_position_error=1e-3,
    tracking_window_velocity_error=1e-2,
)


def _metrics(*agents: AgentMetrics, **overrides: object) -> RunMetrics:
    fields: dict[str, object] = {
        "agents": agents or (GOOD_AGENT,),
        "observer_lyapunov_violations": 0,
        "max_identity_residual": 1e-9,
        "omega_error_averages": (0.3, 0.2, 0.1),
    }
    fields.update(overrides)
    return RunMetrics(**fields)  # type: ignore[arg-type]


def _status(checks: list, name: str) -> CheckStatus:
    return next(check.status for check in checks if check.name == name)


class TestEvaluateChecks:
    """Verdicts from metrics and thresholds alone."""

    def test_all_pass(self) -> None:
        checks = evaluate_checks(_metrics(), AcceptanceThresholds(), leader_excited=True)
        assert [c.name for c in checks] == [
            "observer_convergence",
            "frequency_learning",
            "tracking_position",
            "tracking_velocity",
            "lyapunov_monotonicity",
            "error_identity",
        ]
        assert all(c.status is CheckStatus.PASS for c in checks)

    def test_observer_error_fails(self) -> None:
        agent = replace(GOOD_AGENT, observer_window_eta_error=2e-2)
        checks = evaluate_checks(_metrics(agent), AcceptanceThresholds(), True)
        assert _status(checks, "observer_convergence") is CheckStatus.FAIL

    def test_unexciting_leader_is_indeterminate(self) -> None:
        agent = replace(GOOD_AGENT, final_omega_error=0.7)
        checks = evaluate_checks(_metrics(agent), AcceptanceThresholds(), leader_excited=False)
        assert _status(checks, "frequency_learning") is CheckStatus.INDETERMINATE
        assert _status(checks, "observer_convergence") is CheckStatus.PASS

    def test_non_monotone_averages_fail(self) -> None:
        checks = evaluate_checks(
            _metrics(omega_error_averages=(0.1, 0.2)), AcceptanceThresholds(), True
        )
        assert _status(checks, "frequency_learning") is CheckStatus.FAIL

    def test_lyapunov_violation_fails(self) -> None:
        checks = evaluate_checks(
            _metrics(observer_lyapunov_violations=3), AcceptanceThresholds(), True
        )
        assert _status(checks, "lyapunov_monotonicity") is CheckStatus.FAIL

    def test_identity_residual_bound_is_inclusive(self) -> None:
        thresholds = AcceptanceThresholds()
        tolerance = thresholds.identity_tolerance(0.01)
        assert tolerance == pytest.approx(1e-9 + 1e-6)
        checks = evaluate_checks(
            _metrics(max_identity_residual=tolerance, record_interval=0.01), thresholds, True
        )
        assert _status(checks, "error_identity") is CheckStatus.PASS

    def test_identity_tolerance_tightens_with_sampling(self) -> None:
        checks = evaluate_checks(
            _metrics(max_identity_residual=1e-8, record_interval=1e-3),
            AcceptanceThresholds(),
            True,
        )
        assert _status(checks, "error_identity") is CheckStatus.FAIL

    def test_observer_only_skips_plant_checks(self) -> None:
        agent = replace(
            GOOD_AGENT,
            tracking_window_position_error=None,
            tracking_window_velocity_error=None,
        )
        checks = evaluate_checks(
            _metrics(agent, max_identity_residual=None), AcceptanceThresholds(), True
        )
        names = {c.name for c in checks}
        assert "tracking_position" not in names
        assert "error_identity" not in names

    def test_worst_agent_decides(self) -> None:
        bad = replace(GOOD_AGENT, agent=2, tracking_window_position_error=0.5)
        checks = evaluate_checks(_metrics(GOOD_AGENT, bad), AcceptanceThresholds(), True)
        result = next(c for c in checks if c.name == "tracking_position")
        assert result.status is CheckStatus.FAIL
        assert result.value == 0.5


class TestHelpers:
    """Monotonicity test and table formatting."""

    @pytest.mark.parametrize(
        ("values", "expected"),
        [((3.0, 2.0, 2.0), True), ((1.0, 1.0 + 1e-10), True), ((1.0, 1.1), False), ((), True)],
    )
    def test_is_non_increasing(self, values: tuple[float, ...], expected: bool) -> None:
        assert is_non_increasing(values, 1e-9) is expected

    def test_format_check_table(self) -> None:
        checks = evaluate_checks(_metrics(), AcceptanceThresholds(), True)
        table = format_check_table(checks).splitlines()
        assert table[0].split() == ["check", "status", "value", "threshold"]
        assert len(table) == len(checks) + 1
        assert "PASS" in table[1]


class TestRunSummary:
    """Summary assembly and verdict."""

    def test_verdict_ignores_indeterminate(self, two_link_scenario: Scenario) -> None:
        summary = summarize_run(two_link_scenario, _metrics())
        assert summary.passed
        assert summary.verdict == "PASS"
        data = summary.to_dict()
        assert data["scenario"]["seed"] == 42
        assert data["scenario"]["followers"] == 6
        assert data["assumptions"]["graph"]["holds"] is True
        assert data["leader_pe"]["is_pe"] is True
        assert {c["name"] for c in data["checks"]} >= {"observer_convergence", "error_identity"}

    def test_verdict_fails(self, two_link_scenario: Scenario) -> None:
        summary = summarize_run(two_link_scenario, _metrics(max_identity_residual=1.0))
        assert not summary.passed
        assert summary.verdict == "FAIL"
