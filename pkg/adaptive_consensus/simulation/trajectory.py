"""Recorded series of one run, all on the same time grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._types import FloatArray
from .scenario import ScenarioMode


def _inf_norm(values: FloatArray) -> FloatArray:
    return np.max(np.abs(values), axis=-1)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded run.

    Shapes use K samples, N followers, leader dimension m = 2l, n joints
    and p parameters.  Plant and controller series are ``None`` in
    observer-only mode.

    Attributes:
        mode: Which subsystems were integrated.
        times: Sample times, (K,).
        leader_state: v(t), (K, m).
        leader_output: q0(t), (K, n).
        leader_velocity: q̇0(t), (K, n).
        eta: Leader-state estimates, (K, N, m).
        omega_hat: Frequency estimates, (K, N, l).
        omega_hat_dot: Frequency-estimate rates, (K, N, l).
        e_v: Neighbor disagreement, (K, N, m).
        eta_tilde: η_i − v, (K, N, m).
        omega_tilde: ω_i − ω, (K, N, l).
        observer_lyapunov: Observer V, (K,).
        q, q_dot: Joint positions and velocities, (K, N, n).
        theta_hat: Parameter estimates, (K, N, p).
        tau: Applied torques, (K, N, n).
        e: q_i − Cη_i, (K, N, n).
        agent_lyapunov: V_i, (K, N).
        identity_residual: ‖ė_i + αe_i − s_i + μ1·C·e_vi‖∞, (K, N).
    """

    mode: ScenarioMode
    times: FloatArray
    leader_state: FloatArray
    leader_output: FloatArray
    leader_velocity: FloatArray
    eta: FloatArray
    omega_hat: FloatArray
    omega_hat_dot: FloatArray
    e_v: FloatArray
    eta_tilde: FloatArray
    omega_tilde: FloatArray
    observer_lyapunov: FloatArray
    q: FloatArray | None = None
    q_dot: FloatArray | None = None
    theta_hat: FloatArray | None = None
    tau: FloatArray | None = None
    e: FloatArray | None = None
    agent_lyapunov: FloatArray | None = None
    identity_residual: FloatArray | None = None

    @property
    def sample_count(self) -> int:
        return int(self.times.size)

    @property
    def follower_count(self) -> int:
        return int(self.eta.shape[1])

    @property
    def has_plants(self) -> bool:
        return self.q is not None

    @property
    def eta_tilde_norm(self) -> FloatArray:
        return _inf_norm(self.eta_tilde)

    @property
    def omega_tilde_norm(self) -> FloatArray:
        return _inf_norm(self.omega_tilde)

    @property
    def e_v_norm(self) -> FloatArray:
        """‖e_vi‖∞, (K, N)."""
        return _inf_norm(self.e_v)

    @property
    def e_norm(self) -> FloatArray | None:
        return None if self.e is None else _inf_norm(self.e)

    @property
    def e_v_energy(self) -> FloatArray:
        """Σ_i ‖e_vi‖², the observer dissipation rate divided by μ1, (K,)."""
        return np.sum(self.e_v * self.e_v, axis=(-2, -1))

    @property
    def position_error(self) -> FloatArray | None:
        """‖q_i − q0‖∞, (K, N)."""
        return None if self.q is None else _inf_norm(self.q - self.leader_output[:, None, :])

    @property
    def velocity_error(self) -> FloatArray | None:
        """‖q̇_i − q̇0‖∞, (K, N)."""
        if self.q_dot is None:
            return None
        return _inf_norm(self.q_dot - self.leader_velocity[:, None, :])

    def terminal_state(self) -> FloatArray:
        """Final estimator (and plant) state of every agent, flattened."""
        parts = [self.eta[-1], self.omega_hat[-1]]
        if self.q is not None and self.q_dot is not None and self.theta_hat is not None:
            parts = [self.q[-1], self.q_dot[-1], *parts, self.theta_hat[-1]]
        return np.concatenate(parts, axis=1).ravel()
