"""
Simulation Engine

Integrates the coupled leader, observer, plant and controller network with
fixed-step RK4.  The leader enters every stage through its closed form;
the integrated state stacks, per follower, ``[q, q̇, η, ω̂, Θ̂]`` (closed
loop) or ``[η, ω̂]`` (observer only).  All followers are evaluated with
one batched call per term, in the same order for every agent.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace

import numpy as np

from .._types import FloatArray, RhsFunction
from ..control.controller import closed_loop_diagnostics, control_signals
from ..estimation.observer import ObserverVariant, observer_lyapunov_series, observer_rates
from ..models.leader import LeaderPropagator, leader_closed_form, leader_output
from ..models.plant import ARM_DOF, ARM_PARAM_DIM
from .integrator import integrate
from .metrics import MetricWindows, RunMetrics, SettlingThresholds, compute_metrics
from .scenario import Scenario, ScenarioMode, plant_states
from .trajectory import Trajectory

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class StateLayout:
    """Per-agent column blocks of the stacked state.

    The flat state is the row-major ravel of an (N, width) array whose
    columns are the blocks in :attr:`blocks` order.
    """

    follower_count: int
    m: int
    l: int  # noqa: E741
    mode: ScenarioMode
    n: int = ARM_DOF
    p: int = ARM_PARAM_DIM

    @property
    def blocks(self) -> tuple[tuple[str, int], ...]:
        if self.mode is ScenarioMode.OBSERVER_ONLY:
            return (("eta", self.m), ("omega_hat", self.l))
        return (
            ("q", self.n),
            ("q_dot", self.n),
            ("eta", self.m),
            ("omega_hat", self.l),
            ("theta_hat", self.p),
        )

    @property
    def width(self) -> int:
        return sum(size for _, size in self.blocks)

    @property
    def size(self) -> int:
        return self.follower_count * self.width

    def slices(self) -> dict[str, slice]:
        out: dict[str, slice] = {}
        start = 0
        for name, size in self.blocks:
            out[name] = slice(start, start + size)
            start += size
        return out

    def pack(self, **blocks: FloatArray) -> FloatArray:
        """Flatten per-block (N, size) arrays into the stacked state."""
        return np.concatenate([blocks[name] for name, _ in self.blocks], axis=1).ravel()

    def unpack(self, x: FloatArray) -> dict[str, FloatArray]:
        """Views of the blocks; ``x`` may carry leading sample axes."""
        z = x.reshape(*x.shape[:-1], self.follower_count, self.width)
        return {name: z[..., sl] for name, sl in self.slices().items()}

    def describe(self, index: int) -> str:
        """Readable name of flat component ``index``, e.g. ``agent 3 q_dot[2]``."""
        agent, offset = divmod(index, self.width)
        for name, sl in self.slices().items():
            if sl.start <= offset < sl.stop:
                return f"agent {agent + 1} {name}[{offset - sl.start + 1}]"
        raise IndexError(index)


def state_layout(scenario: Scenario) -> StateLayout:
    return StateLayout(
        follower_count=scenario.follower_count,
        m=scenario.leader.m,
        l=scenario.leader.l,
        mode=scenario.mode,
    )


def initial_state(scenario: Scenario, layout: StateLayout | None = None) -> FloatArray:
    """Stacked state at t = 0, including the seeded ω_i(0) draws."""
    layout = layout or state_layout(scenario)
    blocks = {"eta": scenario.initial_eta(), "omega_hat": scenario.initial_omega_hat()}
    if layout.mode is ScenarioMode.CLOSED_LOOP:
        q0, q_dot0 = plant_states(scenario.agents)
        blocks.update(
            q=q0,
            q_dot=q_dot0,
            theta_hat=np.stack([agent.theta_hat0 for agent in scenario.agents]),
        )
    return layout.pack(**blocks)


def build_rhs(scenario: Scenario, layout: StateLayout | None = None) -> RhsFunction:
    """Right-hand side f(t, x) of the stacked network state."""
    layout = layout or state_layout(scenario)
    leader = scenario.leader
    coupling = scenario.graph.coupling
    propagator = LeaderPropagator.of(leader)
    gains = scenario.gains
    variant = scenario.observer_variant
    omega_true = None if variant is ObserverVariant.ADAPTIVE else leader.omega
    n, width = scenario.follower_count, layout.width
    sl = layout.slices()

    if layout.mode is ScenarioMode.OBSERVER_ONLY:

        def observer_only(t: float, x: FloatArray) -> FloatArray:
            z = x.reshape(n, width)
            eta_dot, omega_dot, _ = observer_rates(
                variant,
                coupling,
                z[:, sl["eta"]],
                z[:, sl["omega_hat"]],
                propagator.state(t),
                omega_true,
                gains.mu1,
                gains.mu2,
            )
            return np.concatenate((eta_dot, omega_dot), axis=1).ravel()

        return observer_only

    plant = scenario.plant
    thetas = scenario.thetas
    c_out = leader.c_out

    def closed_loop(t: float, x: FloatArray) -> FloatArray:
        z = x.reshape(n, width)
        q, q_dot = z[:, sl["q"]], z[:, sl["q_dot"]]
        eta, omega_hat = z[:, sl["eta"]], z[:, sl["omega_hat"]]
        eta_dot, omega_dot, _ = observer_rates(
            variant,
            coupling,
            eta,
            omega_hat,
            propagator.state(t),
            omega_true,
            gains.mu1,
            gains.mu2,
        )
        signals = control_signals(
            plant, q, q_dot, eta, eta_dot, omega_hat, omega_dot, z[:, sl["theta_hat"]], c_out, gains
        )
        q_ddot = plant.accel(q, q_dot, signals.tau, thetas)
        return np.concatenate(
            (q_dot, q_ddot, eta_dot, omega_dot, signals.theta_hat_dot), axis=1
        ).ravel()

    return closed_loop


def _build_trajectory(
    scenario: Scenario, layout: StateLayout, times: FloatArray, states: FloatArray
) -> Trajectory:
    leader = scenario.leader
    gains = scenario.gains
    blocks = layout.unpack(states)
    eta = np.ascontiguousarray(blocks["eta"])
    omega_hat = np.ascontiguousarray(blocks["omega_hat"])
    v = leader_closed_form(leader, times)
    q0, q0_dot = leader_output(leader, v)
    variant = scenario.observer_variant
    eta_dot, omega_dot, e_v = observer_rates(
        variant,
        scenario.graph.coupling,
        eta,
        omega_hat,
        v,
        None if variant is ObserverVariant.ADAPTIVE else leader.omega,
        gains.mu1,
        gains.mu2,
    )
    eta_tilde = eta - v[:, None, :]
    omega_tilde = omega_hat - leader.omega
    base = Trajectory(
        mode=layout.mode,
        times=times,
        leader_state=v,
        leader_output=q0,
        leader_velocity=q0_dot,
        eta=eta,
        omega_hat=omega_hat,
        omega_hat_dot=omega_dot,
        e_v=e_v,
        eta_tilde=eta_tilde,
        omega_tilde=omega_tilde,
        observer_lyapunov=observer_lyapunov_series(
            scenario.graph.coupling.h, eta_tilde, omega_tilde, gains.mu2
        ),
    )
    if layout.mode is ScenarioMode.OBSERVER_ONLY:
        return base

    q = np.ascontiguousarray(blocks["q"])
    q_dot = np.ascontiguousarray(blocks["q_dot"])
    theta_hat = np.ascontiguousarray(blocks["theta_hat"])
    signals = control_signals(
        scenario.plant, q, q_dot, eta, eta_dot, omega_hat, omega_dot, theta_hat, leader.c_out, gains
    )
    with_plants = replace(base, q=q, q_dot=q_dot, theta_hat=theta_hat, tau=signals.tau)
    diagnostics = closed_loop_diagnostics(with_plants, scenario)
    return replace(
        with_plants,
        e=diagnostics.e,
        agent_lyapunov=diagnostics.lyapunov,
        identity_residual=diagnostics.identity_residual,
    )


def run_scenario(
    scenario: Scenario,
    *,
    settling: SettlingThresholds | None = None,
    windows: MetricWindows | None = None,
) -> tuple[Trajectory, RunMetrics]:
    """Integrate ``scenario`` and reduce the recording to metrics.

    Deterministic: equal scenarios (seed included) give bitwise-equal
    trajectories.

    Raises:
        IntegrationError: If a stage derivative becomes non-finite; the
            message names the time and state component.
        SingularMassMatrixError: If an inertia matrix degenerates.
    """
    layout = state_layout(scenario)
    settings = scenario.integration
    steps = settings.steps
    logger.info(
        "Running %s scenario: %d followers, h=%g, %d steps, seed %d",
        scenario.mode.value,
        scenario.follower_count,
        settings.h,
        steps,
        scenario.seed,
    )
    started = time.perf_counter()
    times, states = integrate(
        build_rhs(scenario, layout),
        initial_state(scenario, layout),
        settings.h,
        steps,
        record_every=settings.record_every,
        describe=layout.describe,
    )
    trajectory = _build_trajectory(scenario, layout, times, states)
    metrics = compute_metrics(trajectory, settling, windows)
    logger.info(
        "Run finished in %.2f s: %d samples, %d Lyapunov violations",
        time.perf_counter() - started,
        trajectory.sample_count,
        metrics.lyapunov_violation_count,
    )
    return trajectory, metrics
