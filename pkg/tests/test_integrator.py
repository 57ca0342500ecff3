"""Tests for the fixed-step RK4 integrator."""

from __future__ import annotations

import math

import numpy as np
import pytest

from adaptive_consensus.errors import ErrorCode
from adaptive_consensus.exceptions import IntegrationError, ModelValidationError
from adaptive_consensus.models.leader import leader_closed_form
from adaptive_consensus.simulation.builtin import builtin_leader
from adaptive_consensus.simulation.integrator import integrate, rk4_step


class TestRk4Step:
    """Single steps."""

    def test_constant_state(self) -> None:
        x = np.array([1.0, -2.0, 3.0])
        np.testing.assert_array_equal(rk4_step(lambda t, x: np.zeros_like(x), x, 0.0, 0.1), x)

    def test_exponential_decay(self) -> None:
        h = 0.1
        out = rk4_step(lambda t, x: -x, np.array([1.0]), 0.0, h)
        taylor = 1 - h + h**2 / 2 - h**3 / 6 + h**4 / 24
        assert out[0] == pytest.approx(taylor, abs=1e-15)
        assert out[0] == pytest.approx(math.exp(-h), abs=1e-7)

    def test_time_dependent_rhs(self) -> None:
        # ẋ = 3t² integrates exactly for a cubic.
        out = rk4_step(lambda t, x: np.array([3.0 * t * t]), np.array([0.0]), 1.0, 0.5)
        assert out[0] == pytest.approx(1.5**3 - 1.0, abs=1e-14)

    def test_reports_non_finite_stage(self) -> None:
        def rhs(t: float, x: np.ndarray) -> np.ndarray:
            return np.array([1.0, np.nan]) if t > 0.2 else np.ones(2)

        with pytest.raises(IntegrationError) as exc_info:
            rk4_step(rhs, np.zeros(2), 0.2, 0.1, describe=lambda i: f"component {i}")
        err = exc_info.value
        assert err.stage == 2
        assert err.t == pytest.approx(0.25)
        assert err.component == "component 1"
        assert err.error_code is ErrorCode.INTEGRATION_FAILED
        assert "t=0.25" in err.message

    def test_default_component_name(self) -> None:
        with pytest.raises(IntegrationError) as exc_info:
            rk4_step(lambda t, x: x * np.inf, np.ones(3), 0.0, 0.1)
        assert exc_info.value.component == "x[0]"
        assert exc_info.value.stage == 1


class TestIntegrate:
    """Multi-step runs and recording."""

    def test_record_grid_includes_final_step(self) -> None:
        times, states = integrate(lambda t, x: np.ones_like(x), np.zeros(1), 0.1, 10, record_every=3)
        np.testing.assert_allclose(times, [0.0, 0.3, 0.6, 0.9, 1.0])
        np.testing.assert_allclose(states[:, 0], times, atol=1e-14)

    def test_times_have_no_drift(self) -> None:
        times, _ = integrate(lambda t, x: x * 0.0, np.zeros(1), 1e-3, 10_000, record_every=1000)
        assert times[-1] == pytest.approx(10.0, abs=1e-12)
        np.testing.assert_array_equal(times, 1e-3 * np.arange(0, 10_001, 1000))

    def test_zero_steps(self) -> None:
        times, states = integrate(lambda t, x: -x, np.ones(2), 0.1, 0)
        np.testing.assert_array_equal(times, [0.0])
        np.testing.assert_array_equal(states, [[1.0, 1.0]])

    @pytest.mark.parametrize(
        ("h", "steps", "record_every"), [(0.0, 10, 1), (-0.1, 10, 1), (0.1, -1, 1), (0.1, 10, 0)]
    )
    def test_rejects_invalid_grid(self, h: float, steps: int, record_every: int) -> None:
        with pytest.raises(ModelValidationError):
            integrate(lambda t, x: x, np.ones(1), h, steps, record_every=record_every)

    def test_leader_matches_closed_form(self) -> None:
        leader = builtin_leader()
        generator = leader.generator
        times, states = integrate(
            lambda t, x: generator @ x, leader.v0.copy(), 1e-3, 10_000, record_every=100
        )
        exact = leader_closed_form(leader, times)
        assert float(np.max(np.abs(states - exact))) <= 1e-8

    def test_fourth_order_convergence(self) -> None:
        def error(h: float) -> float:
            steps = int(round(1.0 / h))
            _, states = integrate(lambda t, x: -x, np.ones(1), h, steps)
            return abs(states[-1, 0] - math.exp(-1.0))

        ratio = error(0.1) / error(0.05)
        assert 14.0 < ratio < 18.0
