"""Tests for the harmonic leader, its closed form and the excitation test."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptive_consensus.errors import ErrorCode
from adaptive_consensus.exceptions import ModelValidationError, SamplingError
from adaptive_consensus.models.excitation import (
    default_pe_epsilon,
    leader_pe_report,
    pe_gram,
)
from adaptive_consensus.models.leader import (
    LeaderModel,
    LeaderPropagator,
    build_s,
    check_assumption3,
    leader_closed_form,
    leader_output,
    leader_trajectory,
    skew_apply,
)
from adaptive_consensus.simulation.builtin import builtin_leader
from adaptive_consensus.simulation.integrator import integrate


class TestBuildS:
    """Block-diagonal generator S(ω)."""

    def test_two_frequencies(self) -> None:
        expected = np.array(
            [
                [0.0, 4.0, 0.0, 0.0],
                [-4.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 2.0],
                [0.0, 0.0, -2.0, 0.0],
            ]
        )
        np.testing.assert_array_equal(build_s([4.0, 2.0]), expected)

    @given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=5))
    @settings(max_examples=100, deadline=None)
    def test_exactly_skew_symmetric(self, omega: list[float]) -> None:
        s = build_s(omega)
        assert np.array_equal(s, -s.T)

    def test_skew_apply_matches_matrix(self) -> None:
        rng = np.random.default_rng(0)
        z = rng.normal(size=(5, 3))
        x = rng.normal(size=(5, 6))
        expected = np.stack([build_s(z[k]) @ x[k] for k in range(5)])
        np.testing.assert_allclose(skew_apply(z, x), expected, atol=1e-14)


class TestLeaderModel:
    """Construction and invariants."""

    @pytest.mark.parametrize(
        ("omega", "v0", "c_out", "field"),
        [
            ([4.0, 0.0], [1, 0, 1, 0], np.eye(4)[:2], "omega"),
            ([4.0, -2.0], [1, 0, 1, 0], np.eye(4)[:2], "omega"),
            ([4.0, 2.0], [1, 0, 1], np.eye(4)[:2], "v0"),
            ([4.0, 2.0], [1, 0, 1, 0], np.eye(3), "C"),
        ],
    )
    def test_rejects_invalid(
        self, omega: list[float], v0: list[float], c_out: np.ndarray, field: str
    ) -> None:
        with pytest.raises(ModelValidationError) as exc_info:
            LeaderModel(omega=np.array(omega), v0=np.array(v0, dtype=float), c_out=c_out)
        assert exc_info.value.location["field"] == field

    def test_dimensions(self) -> None:
        leader = builtin_leader()
        assert (leader.l, leader.m, leader.n) == (2, 4, 2)
        assert leader.to_dict()["omega"] == [4.0, 2.0]

    def test_from_amplitudes(self) -> None:
        leader = LeaderModel.from_amplitudes([2.0, 0.5], [0.3, 1.1], [3.0, 1.0])
        t = 0.7
        q0, _ = leader_output(leader, leader_closed_form(leader, t))
        np.testing.assert_allclose(
            q0, [2.0 * math.sin(3.0 * t + 0.3), 0.5 * math.sin(1.0 * t + 1.1)], atol=1e-14
        )


class TestClosedForm:
    """Exact trajectory of v̇ = S(ω)v."""

    def test_initial_state(self) -> None:
        leader = builtin_leader()
        np.testing.assert_array_equal(leader_closed_form(leader, 0.0), leader.v0)

    def test_eighth_period_of_fast_block(self) -> None:
        v = leader_closed_form(builtin_leader(), math.pi / 8)
        half_root = math.sqrt(2.0) / 2.0
        np.testing.assert_allclose(v, [0.0, -1.0, half_root, -half_root], atol=1e-15)

    def test_propagator_scalar_times_match_grid(self) -> None:
        leader = builtin_leader()
        propagator = LeaderPropagator.of(leader)
        times = np.linspace(0.0, 3.0, 7)
        rows = np.stack([propagator.state(float(t)) for t in times])
        np.testing.assert_allclose(rows, leader_trajectory(leader, times), rtol=0.0, atol=1e-15)
        np.testing.assert_allclose(np.linalg.norm(rows[:, :2], axis=1), 1.0, rtol=0.0, atol=1e-15)

    @pytest.mark.parametrize("seed", range(4))
    def test_matches_rk4(self, seed: int) -> None:
        rng = np.random.default_rng(seed)
        l = int(rng.integers(1, 4))
        leader = LeaderModel(
            omega=rng.uniform(0.5, 5.0, l), v0=rng.normal(size=2 * l), c_out=np.eye(2 * l)[:1]
        )
        times, states = integrate(
            lambda t, v: leader.generator @ v, leader.v0, 1e-3, 30_000, record_every=1000
        )
        np.testing.assert_allclose(states, leader_trajectory(leader, times), rtol=0.0, atol=1e-6)
        norms = np.linalg.norm(states, axis=1)
        np.testing.assert_allclose(norms, np.linalg.norm(leader.v0), rtol=0.0, atol=1e-6)

    def test_quarter_period(self) -> None:
        leader = LeaderModel(omega=np.array([1.0]), v0=np.array([0.0, 1.0]), c_out=np.eye(2))
        np.testing.assert_allclose(
            leader_closed_form(leader, math.pi / 2), [1.0, 0.0], atol=1e-15
        )

    def test_derivative_matches_generator(self) -> None:
        leader = builtin_leader()
        t, dt = 1.3, 1e-6
        numeric = (leader_closed_form(leader, t + dt) - leader_closed_form(leader, t - dt)) / (
            2 * dt
        )
        np.testing.assert_allclose(
            numeric, leader.generator @ leader_closed_form(leader, t), atol=1e-8
        )

    def test_block_norms_conserved(self) -> None:
        leader = builtin_leader()
        v = leader_trajectory(leader, np.linspace(0.0, 30.0, 301))
        norms = np.hypot(v[:, 0::2], v[:, 1::2])
        np.testing.assert_allclose(norms, 1.0, atol=1e-14)

    def test_rejects_negative_time(self) -> None:
        with pytest.raises(ModelValidationError):
            leader_closed_form(builtin_leader(), -1.0)

    def test_output_and_velocity(self) -> None:
        leader = builtin_leader()
        q0, q0_dot = leader_output(leader, leader.v0)
        np.testing.assert_array_equal(q0, [1.0, 1.0])
        np.testing.assert_array_equal(q0_dot, [0.0, 0.0])


class TestAssumption3:
    """Distinct frequencies and a nonzero initial state per block."""

    def test_builtin_leader_holds(self) -> None:
        assert check_assumption3(builtin_leader())

    def test_coincident_frequencies(self) -> None:
        leader = LeaderModel(
            omega=np.array([2.0, 2.0]), v0=np.ones(4), c_out=np.eye(4)[:2]
        )
        assert check_assumption3(leader).violation is ErrorCode.COINCIDENT_FREQUENCIES

    def test_zero_block(self) -> None:
        leader = LeaderModel(
            omega=np.array([4.0, 2.0]),
            v0=np.array([1.0, 0.0, 0.0, 0.0]),
            c_out=np.eye(4)[:2],
        )
        check = check_assumption3(leader)
        assert not check
        assert check.violation is ErrorCode.ZERO_EXCITATION_BLOCK


class TestPersistentExcitation:
    """Windowed Gram test."""

    def test_builtin_leader_is_pe(self) -> None:
        report = leader_pe_report(builtin_leader(), window=2 * math.pi, epsilon=0.1)
        assert report.is_pe
        assert report.min_gram_eig == pytest.approx(0.5, abs=1e-2)

    def test_zero_block_is_not_pe(self) -> None:
        leader = LeaderModel(
            omega=np.array([4.0, 2.0]),
            v0=np.array([1.0, 0.0, 0.0, 0.0]),
            c_out=np.eye(4)[:2],
        )
        report = leader_pe_report(leader, window=2 * math.pi, epsilon=0.1)
        assert not report.is_pe
        assert report.min_gram_eig == pytest.approx(0.0, abs=1e-12)

    def test_zero_signal_is_not_pe(self) -> None:
        times = np.arange(0.0, 10.0, 1e-2)
        report = pe_gram(times, np.zeros((times.size, 2)), window=1.0)
        assert report.epsilon == default_pe_epsilon(np.zeros(3))
        assert not report.is_pe

    def test_scalar_sinusoid(self) -> None:
        times = np.arange(0.0, 4 * math.pi + 0.01, 1e-3)
        report = pe_gram(times, np.sin(times), window=2 * math.pi)
        assert report.min_gram_eig == pytest.approx(0.5, abs=1e-3)
        assert report.is_pe
        assert report.window_count > 0

    def test_too_short_record(self) -> None:
        times = np.arange(0.0, 1.0, 1e-2)
        with pytest.raises(SamplingError) as exc_info:
            pe_gram(times, np.sin(times), window=1.0)
        assert exc_info.value.error_code is ErrorCode.INSUFFICIENT_SAMPLES

    def test_nonuniform_sampling(self) -> None:
        times = np.sort(np.random.default_rng(1).uniform(0.0, 10.0, 500))
        with pytest.raises(SamplingError) as exc_info:
            pe_gram(times, np.sin(times), window=1.0)
        assert exc_info.value.error_code is ErrorCode.NONUNIFORM_SAMPLING
