"""
Scenario Description

A scenario bundles everything one run needs: the communication graph, the
leader, per-follower plant parameters and initial conditions, the gains,
the integration grid and the seed for randomized initial frequency
estimates.  Construction validates the whole bundle, so an existing
``Scenario`` is always runnable.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .._types import AssumptionCheck, FloatArray
from ..control.controller import ControllerGains
from ..errors import ErrorCode
from ..estimation.observer import ObserverVariant
from ..exceptions import GraphValidationError, ModelValidationError
from ..models.leader import LeaderModel, check_assumption3
from ..models.plant import ARM_DOF, ARM_PARAM_DIM, ArmParams, PlantState, TwoLinkArm
from ..network.topology import Digraph
from .seeding import SEED_BOUND, SplitMix64

logger = logging.getLogger(__name__)

# Relative mismatch between T and a whole number of steps that is tolerated silently.
HORIZON_ROUNDING_TOLERANCE: float = 1e-9


class ScenarioMode(str, Enum):
    """Which subsystems are integrated."""

    CLOSED_LOOP = "closed_loop"
    OBSERVER_ONLY = "observer_only"


@dataclass(frozen=True, slots=True)
class RandomUniform:
    """Initial frequency estimates drawn i.i.d. from U[low, high]."""

    low: float
    high: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.low) and math.isfinite(self.high) and self.low <= self.high):
            raise ModelValidationError(
                f"Random range must satisfy low <= high, got [{self.low}, {self.high}]",
                location={"field": "omega_hat0_random"},
            )


@dataclass(frozen=True, eq=False)
class AgentSpec:
    """One follower: its arm, plant state and estimator initial conditions.

    ``theta_hat0`` and ``eta0`` default to zero; ``eta0`` is sized from the
    leader when the scenario is built.
    """

    params: ArmParams
    omega_hat0: FloatArray | RandomUniform
    state0: PlantState = field(
        default_factory=lambda: PlantState(np.zeros(ARM_DOF), np.zeros(ARM_DOF))
    )
    theta_hat0: FloatArray = field(default_factory=lambda: np.zeros(ARM_PARAM_DIM))
    eta0: FloatArray | None = None

    def __post_init__(self) -> None:
        theta_hat0 = np.array(self.theta_hat0, dtype=float)
        if theta_hat0.shape != (ARM_PARAM_DIM,) or not np.all(np.isfinite(theta_hat0)):
            raise ModelValidationError(
                f"theta_hat0 must be a finite {ARM_PARAM_DIM}-vector, got shape "
                f"{theta_hat0.shape}",
                code=ErrorCode.DIMENSION_MISMATCH,
                location={"field": "theta_hat0"},
            )
        object.__setattr__(self, "theta_hat0", theta_hat0)
        if self.state0.q.shape != (ARM_DOF,):
            raise ModelValidationError(
                f"q0 must have {ARM_DOF} entries, got {self.state0.q.shape}",
                code=ErrorCode.DIMENSION_MISMATCH,
                location={"field": "q0"},
            )
        if not isinstance(self.omega_hat0, RandomUniform):
            omega_hat0 = np.array(self.omega_hat0, dtype=float)
            if omega_hat0.ndim != 1 or not np.all(np.isfinite(omega_hat0)):
                raise ModelValidationError(
                    "omega_hat0 must be a finite vector",
                    code=ErrorCode.DIMENSION_MISMATCH,
                    location={"field": "omega_hat0"},
                )
            object.__setattr__(self, "omega_hat0", omega_hat0)
        if self.eta0 is not None:
            eta0 = np.array(self.eta0, dtype=float)
            if eta0.ndim != 1 or not np.all(np.isfinite(eta0)):
                raise ModelValidationError(
                    "eta0 must be a finite vector",
                    code=ErrorCode.DIMENSION_MISMATCH,
                    location={"field": "eta0"},
                )
            object.__setattr__(self, "eta0", eta0)


@dataclass(frozen=True, slots=True)
class IntegrationSettings:
    """Fixed-step grid: step ``h`` (s), horizon ``T`` (s), record stride."""

    h: float = 1e-3
    T: float = 30.0
    record_every: int = 10

    def __post_init__(self) -> None:
        if not (math.isfinite(self.h) and self.h > 0):
            raise ModelValidationError(
                f"Step size h must be positive, got {self.h}", location={"field": "h"}
            )
        if not (math.isfinite(self.T) and self.T >= self.h):
            raise ModelValidationError(
                f"Horizon T must be >= h, got T={self.T}, h={self.h}", location={"field": "T"}
            )
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ModelValidationError(
                f"record_every must be a positive integer, got {self.record_every}",
                location={"field": "record_every"},
            )

    @property
    def steps(self) -> int:
        """Number of whole steps; T is rounded to the nearest multiple of h."""
        steps = max(1, round(self.T / self.h))
        if abs(steps * self.h - self.T) > HORIZON_ROUNDING_TOLERANCE * self.T:
            logger.warning(
                "Horizon T=%g is not a multiple of h=%g; integrating to %g",
                self.T,
                self.h,
                steps * self.h,
            )
        return steps


@dataclass(frozen=True, eq=False)
class Scenario:
    """Complete, validated run description.

    Raises on construction:
        GraphValidationError: If the graph fails the leader-rooted spanning
            tree / undirected follower check (code names the failed part).
        ModelValidationError: On any dimension or mode mismatch.
    """

    graph: Digraph
    leader: LeaderModel
    agents: tuple[AgentSpec, ...]
    gains: ControllerGains
    integration: IntegrationSettings = field(default_factory=IntegrationSettings)
    seed: int = 42
    mode: ScenarioMode = ScenarioMode.CLOSED_LOOP
    observer_variant: ObserverVariant = ObserverVariant.ADAPTIVE

    def __post_init__(self) -> None:
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "mode", ScenarioMode(self.mode))
        object.__setattr__(self, "observer_variant", ObserverVariant(self.observer_variant))
        check = self.graph.assumption1
        if not check:
            raise GraphValidationError(
                f"Graph fails the spanning-tree/undirected-follower assumption: "
                f"{check.diagnostic}",
                code=check.violation,
                location={"field": "graph.edges"},
                suggestion="Add an edge from the leader (node 0) and make follower edges two-way",
            )
        if len(self.agents) != self.graph.follower_count:
            raise ModelValidationError(
                f"Scenario has {len(self.agents)} agents but the graph has "
                f"{self.graph.follower_count} followers",
                code=ErrorCode.DIMENSION_MISMATCH,
                location={"field": "agents"},
            )
        if self.leader.n != ARM_DOF or self.gains.dof != ARM_DOF:
            raise ModelValidationError(
                f"Leader output and K must match the arm's {ARM_DOF} joints, got "
                f"n={self.leader.n} and K {self.gains.k_gain.shape}",
                code=ErrorCode.DIMENSION_MISMATCH,
                location={"field": "leader.C"},
            )
        if self.gains.param_dim != ARM_PARAM_DIM:
            raise ModelValidationError(
                f"Lambda must be {ARM_PARAM_DIM}x{ARM_PARAM_DIM}, got "
                f"{self.gains.lambda_gain.shape}",
                code=ErrorCode.DIMENSION_MISMATCH,
                location={"field": "gains.Lambda"},
            )
        for index, agent in enumerate(self.agents, start=1):
            if not isinstance(agent.omega_hat0, RandomUniform) and agent.omega_hat0.shape != (
                self.leader.l,
            ):
                raise ModelValidationError(
                    f"Agent {index}: omega_hat0 must have {self.leader.l} entries",
                    code=ErrorCode.DIMENSION_MISMATCH,
                    location={"field": f"agents[{index - 1}].omega_hat0"},
                )
            if agent.eta0 is not None and agent.eta0.shape != (self.leader.m,):
                raise ModelValidationError(
                    f"Agent {index}: eta0 must have {self.leader.m} entries",
                    code=ErrorCode.DIMENSION_MISMATCH,
                    location={"field": f"agents[{index - 1}].eta0"},
                )
        if (
            self.observer_variant is not ObserverVariant.ADAPTIVE
            and self.mode is not ScenarioMode.OBSERVER_ONLY
        ):
            raise ModelValidationError(
                f"The {self.observer_variant.value} observer is only available in "
                f"observer_only mode",
                location={"field": "observer_variant"},
            )
        if int(self.seed) != self.seed or not 0 <= self.seed < SEED_BOUND:
            raise ModelValidationError(
                f"seed must be an integer in [0, 2**64), got {self.seed}",
                location={"field": "seed"},
            )
        if not self.leader_assumption:
            logger.warning(
                "Leader fails the excitation assumption (%s); frequency estimates "
                "need not converge",
                self.leader_assumption.diagnostic,
            )

    @property
    def follower_count(self) -> int:
        return len(self.agents)

    @property
    def leader_assumption(self) -> AssumptionCheck:
        return check_assumption3(self.leader)

    @property
    def thetas(self) -> FloatArray:
        """True parameter vectors, shape (N, p)."""
        return np.stack([agent.params.theta for agent in self.agents])

    @property
    def gravities(self) -> FloatArray:
        return np.array([agent.params.gravity for agent in self.agents])

    @property
    def plant(self) -> TwoLinkArm:
        """Arm model evaluating all followers at once."""
        return TwoLinkArm(gravity=self.gravities)

    def initial_omega_hat(self) -> FloatArray:
        """ω_i(0) for every agent, shape (N, l).

        Random entries come from one SplitMix64 stream seeded with ``seed``;
        agents draw l values each, in agent order.  Fixed entries consume no
        draws.
        """
        rng = SplitMix64(self.seed)
        rows = []
        for agent in self.agents:
            spec = agent.omega_hat0
            if isinstance(spec, RandomUniform):
                rows.append(rng.uniform(spec.low, spec.high, self.leader.l))
            else:
                rows.append(np.array(spec, dtype=float))
        return np.stack(rows)

    def initial_eta(self) -> FloatArray:
        return np.stack(
            [
                np.zeros(self.leader.m) if agent.eta0 is None else agent.eta0
                for agent in self.agents
            ]
        )


def scenario_with(
    scenario: Scenario,
    *,
    seed: int | None = None,
    h: float | None = None,
    T: float | None = None,
    mode: ScenarioMode | None = None,
    observer_variant: ObserverVariant | None = None,
    leader: LeaderModel | None = None,
) -> Scenario:
    """Copy of ``scenario`` with selected fields overridden (re-validated)."""
    integration = IntegrationSettings(
        h=scenario.integration.h if h is None else h,
        T=scenario.integration.T if T is None else T,
        record_every=scenario.integration.record_every,
    )
    return Scenario(
        graph=scenario.graph,
        leader=scenario.leader if leader is None else leader,
        agents=scenario.agents,
        gains=scenario.gains,
        integration=integration,
        seed=scenario.seed if seed is None else seed,
        mode=scenario.mode if mode is None else mode,
        observer_variant=(
            scenario.observer_variant if observer_variant is None else observer_variant
        ),
    )


def plant_states(agents: Sequence[AgentSpec]) -> tuple[FloatArray, FloatArray]:
    """Stacked (q(0), q̇(0)), each of shape (N, n)."""
    return (
        np.stack([agent.state0.q for agent in agents]),
        np.stack([agent.state0.q_dot for agent in agents]),
    )
