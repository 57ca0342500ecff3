"""Tests for the certainty-equivalence adaptive tracking law."""

from __future__ import annotations

import numpy as np
import pytest

from adaptive_consensus.control.controller import (
    ControllerGains,
    ControllerState,
    agent_lyapunov,
    control_signals,
    reference_accel,
    reference_velocity,
    slip,
    theta_hat_rate,
    torque,
)
from adaptive_consensus.errors import ErrorCode
from adaptive_consensus.exceptions import ModelValidationError
from adaptive_consensus.models.leader import skew_apply
from adaptive_consensus.models.plant import TwoLinkArm, regressor
from adaptive_consensus.simulation.builtin import ARM_THETAS, LEADER_C, builtin_gains
from adaptive_consensus.simulation.engine import build_rhs, run_scenario, state_layout
from adaptive_consensus.simulation.integrator import integrate
from adaptive_consensus.simulation.scenario import Scenario, scenario_with

C_OUT = np.array(LEADER_C)
OMEGA = np.array([4.0, 2.0])
GRAVITY_REGRESSOR = np.array([[0, 0, 0, 9.8, 9.8], [0, 0, 0, 0, 9.8]], dtype=float)


class TestControllerGains:
    """Gain validation and construction."""

    def test_builtin_values(self) -> None:
        gains = builtin_gains()
        assert (gains.alpha, gains.mu1, gains.mu2) == (10.0, 10.0, 20.0)
        np.testing.assert_array_equal(gains.k_gain, 20.0 * np.eye(2))
        np.testing.assert_array_equal(gains.lambda_diagonal, np.full(5, 10.0))
        assert (gains.dof, gains.param_dim) == (2, 5)

    def test_to_dict(self) -> None:
        data = builtin_gains().to_dict()
        assert data["K"] == [[20.0, 0.0], [0.0, 20.0]]
        assert data["Lambda"] == [10.0] * 5

    def test_build_from_diagonal_list(self) -> None:
        gains = ControllerGains.build(
            1.0, [[2.0, 0.5], [0.5, 3.0]], [1, 2, 3, 4, 5], 1.0, 1.0, dof=2, param_dim=5
        )
        np.testing.assert_array_equal(gains.lambda_diagonal, [1, 2, 3, 4, 5])

    @pytest.mark.parametrize("name", ["alpha", "mu1", "mu2"])
    @pytest.mark.parametrize("value", [0.0, -1.0, float("inf")])
    def test_rejects_nonpositive_scalars(self, name: str, value: float) -> None:
        kwargs = {"alpha": 10.0, "mu1": 10.0, "mu2": 20.0, name: value}
        with pytest.raises(ModelValidationError) as exc_info:
            ControllerGains.build(k_gain=20.0, lambda_gain=10.0, dof=2, param_dim=5, **kwargs)
        assert exc_info.value.location == {"field": name}

    @pytest.mark.parametrize(
        ("k_gain", "code"),
        [
            ([[1.0, 2.0], [0.0, 1.0]], ErrorCode.NOT_POSITIVE_DEFINITE),
            ([[1.0, 0.0], [0.0, -1.0]], ErrorCode.NOT_POSITIVE_DEFINITE),
            ([1.0, 2.0], ErrorCode.DIMENSION_MISMATCH),
        ],
    )
    def test_rejects_bad_k(self, k_gain: list, code: ErrorCode) -> None:
        with pytest.raises(ModelValidationError) as exc_info:
            ControllerGains(
                alpha=1.0,
                k_gain=np.array(k_gain),
                lambda_gain=np.eye(5),
                mu1=1.0,
                mu2=1.0,
            )
        assert exc_info.value.error_code is code
        assert exc_info.value.location == {"field": "K"}

    def test_rejects_non_diagonal_lambda(self) -> None:
        lam = np.eye(5)
        lam[0, 1] = lam[1, 0] = 0.1
        with pytest.raises(ModelValidationError) as exc_info:
            ControllerGains(alpha=1.0, k_gain=np.eye(2), lambda_gain=lam, mu1=1.0, mu2=1.0)
        assert exc_info.value.location == {"field": "Lambda"}

    def test_rejects_wrong_dimensions(self) -> None:
        with pytest.raises(ModelValidationError) as exc_info:
            ControllerGains.build(1.0, np.eye(3), 1.0, 1.0, 1.0, dof=2, param_dim=5)
        assert exc_info.value.error_code is ErrorCode.DIMENSION_MISMATCH

    def test_controller_state(self) -> None:
        assert ControllerState(theta_hat=np.zeros((6, 5))).theta_hat.shape == (6, 5)
        with pytest.raises(ModelValidationError):
            ControllerState(theta_hat=np.zeros(5))


class TestControlLaw:
    """Individual terms of the law."""

    def test_reference_velocity_example(self) -> None:
        eta = np.array([1.0, 0.0, 1.0, 0.0])
        q_r_dot = reference_velocity(np.zeros(2), eta, OMEGA, C_OUT, 10.0)
        np.testing.assert_allclose(q_r_dot, [10.0, 10.0])

    def test_reference_velocity_without_position_error(self) -> None:
        eta = np.array([0.3, -0.4, 0.2, 0.9])
        q = C_OUT @ eta
        np.testing.assert_allclose(
            reference_velocity(q, eta, OMEGA, C_OUT, 10.0), C_OUT @ skew_apply(OMEGA, eta)
        )

    def test_reference_velocity_at_origin(self) -> None:
        np.testing.assert_array_equal(
            reference_velocity(np.zeros(2), np.zeros(4), OMEGA, C_OUT, 10.0), 0.0
        )

    def test_slip(self) -> None:
        np.testing.assert_array_equal(slip(np.ones(2), np.full(2, 10.0)), [-9.0, -9.0])

    def test_reference_accel_zero_inputs(self) -> None:
        zeros = np.zeros(4)
        out = reference_accel(np.zeros(2), zeros, zeros, np.zeros(2), np.zeros(2), C_OUT, 10.0)
        np.testing.assert_array_equal(out, 0.0)

    def test_reference_accel_feedforward_only(self) -> None:
        eta = np.array([0.1, 0.2, 0.3, 0.4])
        eta_dot = np.array([1.0, -1.0, 0.5, 2.0])
        out = reference_accel(C_OUT @ eta_dot, eta, eta_dot, OMEGA, np.zeros(2), C_OUT, 10.0)
        np.testing.assert_allclose(out, C_OUT @ skew_apply(OMEGA, eta_dot))

    def test_torque_feedback(self) -> None:
        tau = torque(np.array([1.0, 0.0]), np.zeros((2, 5)), np.ones(5), 20.0 * np.eye(2))
        np.testing.assert_array_equal(tau, [-20.0, 0.0])

    def test_torque_feedforward(self) -> None:
        theta = np.array(ARM_THETAS[0])
        tau = torque(np.zeros(2), GRAVITY_REGRESSOR, theta, 20.0 * np.eye(2))
        np.testing.assert_allclose(tau, [9.408, 3.136], atol=1e-12)

    def test_theta_hat_rate_example(self) -> None:
        rate = theta_hat_rate(np.array([1.0, 0.0]), GRAVITY_REGRESSOR, 10.0 * np.eye(5))
        np.testing.assert_allclose(rate, [0.0, 0.0, 0.0, -0.98, -0.98], atol=1e-15)

    def test_theta_hat_rate_zero_slip(self) -> None:
        rate = theta_hat_rate(np.zeros(2), GRAVITY_REGRESSOR, 10.0 * np.eye(5))
        np.testing.assert_array_equal(rate, 0.0)

    def test_batched_over_agents(self) -> None:
        rng = np.random.default_rng(4)
        s = rng.normal(size=(3, 6, 2))
        y = rng.normal(size=(3, 6, 2, 5))
        rate = theta_hat_rate(s, y, 10.0 * np.eye(5))
        np.testing.assert_allclose(rate[1, 2], -(y[1, 2].T @ s[1, 2]) / 10.0)


class TestLyapunovCancellation:
    """With exact observer estimates, V_i decreases at exactly −sᵀKs."""

    @pytest.mark.parametrize("index", range(len(ARM_THETAS)))
    def test_derivative_along_flow(self, index: int) -> None:
        rng = np.random.default_rng(index)
        theta = np.array(ARM_THETAS[index])
        gains = builtin_gains()
        plant = TwoLinkArm()
        state = {
            "q": rng.uniform(-1.0, 1.0, 2),
            "q_dot": rng.uniform(-1.0, 1.0, 2),
            "eta": rng.uniform(-1.0, 1.0, 4),
            "theta_hat": theta + rng.uniform(-0.5, 0.5, 5),
        }

        def lyapunov(x: dict[str, np.ndarray]) -> float:
            q_r_dot = reference_velocity(x["q"], x["eta"], OMEGA, C_OUT, gains.alpha)
            s = slip(x["q_dot"], q_r_dot)
            return float(agent_lyapunov(plant, x["q"], s, theta, x["theta_hat"], gains.lambda_gain))

        eta_dot = skew_apply(OMEGA, state["eta"])
        signals = control_signals(
            plant,
            state["q"],
            state["q_dot"],
            state["eta"],
            eta_dot,
            OMEGA,
            np.zeros(2),
            state["theta_hat"],
            C_OUT,
            gains,
        )
        flow = {
            "q": state["q_dot"],
            "q_dot": plant.accel(state["q"], state["q_dot"], signals.tau, theta),
            "eta": eta_dot,
            "theta_hat": signals.theta_hat_dot,
        }
        dt = 1e-6
        ahead = {k: state[k] + dt * flow[k] for k in state}
        behind = {k: state[k] - dt * flow[k] for k in state}
        numeric = (lyapunov(ahead) - lyapunov(behind)) / (2 * dt)
        expected = -float(signals.s @ gains.k_gain @ signals.s)
        assert numeric == pytest.approx(expected, rel=1e-5, abs=1e-6)

    def test_zero_at_exact_tracking(self) -> None:
        theta = np.array(ARM_THETAS[2])
        value = agent_lyapunov(
            TwoLinkArm(), np.zeros(2), np.zeros(2), theta, theta, 10.0 * np.eye(5)
        )
        assert value == 0.0

    def test_control_signals_regressor_arguments(self) -> None:
        gains = builtin_gains()
        q = np.array([0.2, -0.1])
        q_dot = np.array([0.5, 0.3])
        eta = np.array([1.0, 0.0, 1.0, 0.0])
        eta_dot = skew_apply(OMEGA, eta)
        signals = control_signals(
            TwoLinkArm(), q, q_dot, eta, eta_dot, OMEGA, np.zeros(2), np.zeros(5), C_OUT, gains
        )
        np.testing.assert_allclose(
            signals.regressor, regressor(q, q_dot, signals.q_r_ddot, signals.q_r_dot)
        )
        np.testing.assert_allclose(signals.tau, -gains.k_gain @ signals.s)


class TestReferenceAccelAlongFlow:
    """q̈_r is the time derivative of q̇_r along the closed-loop flow."""

    @pytest.mark.parametrize("sample", [0, 2, 5])
    def test_matches_central_difference(self, two_link_scenario: Scenario, sample: int) -> None:
        scenario = scenario_with(two_link_scenario, T=0.05)
        trajectory, _ = run_scenario(scenario)
        layout = state_layout(scenario)
        rhs = build_rhs(scenario, layout)
        gains = scenario.gains
        c_out = scenario.leader.c_out
        t = float(trajectory.times[sample])
        x = np.concatenate(
            (
                trajectory.q[sample],
                trajectory.q_dot[sample],
                trajectory.eta[sample],
                trajectory.omega_hat[sample],
                trajectory.theta_hat[sample],
            ),
            axis=1,
        ).ravel()
        flow = rhs(t, x)

        def q_r_dot(state: np.ndarray) -> np.ndarray:
            z = layout.unpack(state)
            return reference_velocity(z["q"], z["eta"], z["omega_hat"], c_out, gains.alpha)

        delta = 1e-6
        numeric = (q_r_dot(x + delta * flow) - q_r_dot(x - delta * flow)) / (2 * delta)
        z, rates = layout.unpack(x), layout.unpack(flow)
        analytic = reference_accel(
            z["q_dot"],
            z["eta"],
            rates["eta"],
            z["omega_hat"],
            rates["omega_hat"],
            c_out,
            gains.alpha,
        )
        np.testing.assert_allclose(numeric, analytic, rtol=1e-6, atol=1e-6)


class TestRegulation:
    """With η pinned, ω̂ = 0 and exact parameters, e decays as e(0)·exp(−αt)."""

    def test_exponential_decay(self) -> None:
        gains = builtin_gains()
        plant = TwoLinkArm()
        theta = np.array(ARM_THETAS[1])
        eta = np.array([0.4, 0.0, -0.3, 0.0])
        still = np.zeros(4)
        no_frequency = np.zeros(2)
        q0 = np.array([0.9, -0.6])
        e0 = q0 - C_OUT @ eta
        q_dot0 = reference_velocity(q0, eta, no_frequency, C_OUT, gains.alpha)

        def rhs(t: float, x: np.ndarray) -> np.ndarray:
            q, q_dot, theta_hat = x[:2], x[2:4], x[4:]
            signals = control_signals(
                plant, q, q_dot, eta, still, no_frequency, no_frequency, theta_hat, C_OUT, gains
            )
            q_ddot = plant.accel(q, q_dot, signals.tau, theta)
            return np.concatenate((q_dot, q_ddot, signals.theta_hat_dot))

        times, states = integrate(
            rhs, np.concatenate((q0, q_dot0, theta)), 1e-3, 500, record_every=50
        )
        e = states[:, :2] - C_OUT @ eta
        expected = np.exp(-gains.alpha * times)[:, None] * e0
        np.testing.assert_allclose(e, expected, rtol=0.0, atol=1e-8)
        np.testing.assert_allclose(states[:, 4:], np.tile(theta, (times.size, 1)), atol=1e-9)
