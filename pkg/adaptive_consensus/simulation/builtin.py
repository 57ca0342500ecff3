"""
Built-in Scenarios

The reference six-arm experiment: two-link arms with distinct physical
parameters track a two-frequency harmonic leader.  The leader broadcasts
to every follower and the followers talk over an undirected chain.

Registered names:
    section5            closed loop (alias ``two-link-arm``)
    two-link-observer   observer only
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from ..control.controller import ControllerGains
from ..exceptions import ConfigError
from ..errors import ErrorCode
from ..models.leader import LeaderModel
from ..models.plant import ARM_DOF, ARM_PARAM_DIM, ArmParams
from ..network.topology import leader_broadcast_graph
from .scenario import AgentSpec, IntegrationSettings, RandomUniform, Scenario, ScenarioMode

# Θ_i = col(a1, a2, a3, a4, a5) of the six followers.
ARM_THETAS: tuple[tuple[float, ...], ...] = (
    (0.64, 1.10, 0.08, 0.64, 0.32),
    (0.76, 1.17, 0.14, 0.93, 0.44),
    (0.91, 1.26, 0.22, 1.27, 0.58),
    (1.10, 1.36, 0.32, 1.67, 0.73),
    (1.21, 1.16, 0.12, 1.45, 1.03),
    (1.31, 1.56, 0.22, 1.65, 1.33),
)

LEADER_OMEGA: tuple[float, float] = (4.0, 2.0)
LEADER_V0: tuple[float, ...] = (1.0, 0.0, 1.0, 0.0)
LEADER_C: tuple[tuple[float, ...], ...] = ((1.0, 0.0, 0.0, 0.0), (0.0, 0.0, 1.0, 0.0))

INITIAL_FREQUENCY_RANGE = RandomUniform(0.0, 1.0)


def builtin_leader() -> LeaderModel:
    return LeaderModel(omega=np.array(LEADER_OMEGA), v0=np.array(LEADER_V0), c_out=np.array(LEADER_C))


def builtin_gains() -> ControllerGains:
    """μ1 = 10, μ2 = 20, α = 10, K = 20·I, Λ = 10·I."""
    return ControllerGains.build(
        alpha=10.0,
        k_gain=20.0,
        lambda_gain=10.0,
        mu1=10.0,
        mu2=20.0,
        dof=ARM_DOF,
        param_dim=ARM_PARAM_DIM,
    )


def builtin_section5_scenario(seed: int = 42) -> Scenario:
    """Six arms at rest with Θ̂_i(0) = 0, η_i(0) = 0 and ω_i(0) ~ U[0, 1].

    With the leader heard by every follower, H = I + L_chain has smallest
    eigenvalue 1, which sets the slowest observer mode.
    """
    agents = tuple(
        AgentSpec(params=ArmParams(theta=np.array(theta)), omega_hat0=INITIAL_FREQUENCY_RANGE)
        for theta in ARM_THETAS
    )
    return Scenario(
        graph=leader_broadcast_graph(len(agents)),
        leader=builtin_leader(),
        agents=agents,
        gains=builtin_gains(),
        integration=IntegrationSettings(h=1e-3, T=30.0, record_every=10),
        seed=seed,
    )


builtin_two_link_scenario = builtin_section5_scenario


def builtin_observer_scenario(seed: int = 42) -> Scenario:
    """The same network with the controllers and plants removed."""
    base = builtin_section5_scenario(seed)
    return Scenario(
        graph=base.graph,
        leader=base.leader,
        agents=base.agents,
        gains=base.gains,
        integration=base.integration,
        seed=seed,
        mode=ScenarioMode.OBSERVER_ONLY,
    )


BUILTIN_SCENARIOS: dict[str, Callable[[int], Scenario]] = {
    "section5": builtin_section5_scenario,
    "two-link-arm": builtin_section5_scenario,
    "two-link-observer": builtin_observer_scenario,
}


def builtin_scenario(name: str, seed: int = 42) -> Scenario:
    """Look up a built-in scenario by name.

    Raises:
        ConfigError: If ``name`` is not registered.
    """
    try:
        factory = BUILTIN_SCENARIOS[name]
    except KeyError:
        raise ConfigError(
            f"Unknown built-in scenario {name!r}",
            code=ErrorCode.INVALID_VALUE,
            location={"key": "builtin"},
            suggestion=f"Choose one of: {', '.join(sorted(BUILTIN_SCENARIOS))}",
        ) from None
    return factory(seed)
