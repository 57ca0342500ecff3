"""
Adaptive Consensus - Leader-Following Control of Euler-Lagrange Networks

Provides simulation of networked followers tracking an uncertain harmonic leader:
- Adaptive distributed observer that learns the leader's frequencies
- Certainty-equivalence adaptive tracking controller
- Fixed-step RK4 engine with CSV recording and acceptance checks

Usage:
    from adaptive_consensus import builtin_two_link_scenario, run_scenario

    trajectory, metrics = run_scenario(builtin_two_link_scenario(seed=42))
    print(metrics.to_dict())
"""

from __future__ import annotations

import logging

from ._types import AssumptionCheck, EulerLagrangePlant, FloatArray, RhsFunction
from .config import dump_scenario, load_scenario, parse_scenario, scenario_to_dict
from .control import (
    ClosedLoopDiagnostics,
    ControllerGains,
    ControlSignals,
    closed_loop_diagnostics,
    control_signals,
)
from .errors import ErrorCode, ValidationError, format_error
from .estimation import ObserverErrors, ObserverVariant, observer_errors, observer_rhs
from .exceptions import (
    ConfigError,
    ConsensusError,
    GraphValidationError,
    IntegrationError,
    ModelValidationError,
    SamplingError,
    SingularMassMatrixError,
)
from .models import (
    ArmParams,
    LeaderModel,
    PEReport,
    PlantState,
    TwoLinkArm,
    check_assumption3,
    leader_pe_report,
    pe_gram,
)
from .network import (
    Digraph,
    build_digraph,
    check_assumption1,
    default_example_graph,
    leader_broadcast_graph,
)
from .simulation import (
    AgentSpec,
    IntegrationSettings,
    RandomUniform,
    RunMetrics,
    Scenario,
    ScenarioMode,
    Trajectory,
    builtin_observer_scenario,
    builtin_scenario,
    builtin_section5_scenario,
    builtin_two_link_scenario,
    run_scenario,
    write_summary,
    write_trajectory,
)
from .verification import AcceptanceThresholds, RunSummary, verify_scenario

# Configure package-level logger
logger = logging.getLogger("adaptive_consensus")
logger.addHandler(logging.NullHandler())  # Let users configure handlers

__version__ = "0.1.0"

__all__ = [
    # Graph
    "Digraph",
    "build_digraph",
    "check_assumption1",
    "default_example_graph",
    "leader_broadcast_graph",
    # Leader
    "LeaderModel",
    "PEReport",
    "check_assumption3",
    "leader_pe_report",
    "pe_gram",
    # Plant
    "ArmParams",
    "PlantState",
    "TwoLinkArm",
    # Observer and controller
    "ObserverErrors",
    "ObserverVariant",
    "observer_errors",
    "observer_rhs",
    "ClosedLoopDiagnostics",
    "ControlSignals",
    "ControllerGains",
    "closed_loop_diagnostics",
    "control_signals",
    # Simulation
    "AgentSpec",
    "IntegrationSettings",
    "RandomUniform",
    "RunMetrics",
    "Scenario",
    "ScenarioMode",
    "Trajectory",
    "builtin_observer_scenario",
    "builtin_scenario",
    "builtin_section5_scenario",
    "builtin_two_link_scenario",
    "run_scenario",
    "write_summary",
    "write_trajectory",
    # Configuration
    "dump_scenario",
    "load_scenario",
    "parse_scenario",
    "scenario_to_dict",
    # Verification
    "AcceptanceThresholds",
    "RunSummary",
    "verify_scenario",
    # Types
    "AssumptionCheck",
    "EulerLagrangePlant",
    "FloatArray",
    "RhsFunction",
    # Errors
    "ConsensusError",
    "ConfigError",
    "GraphValidationError",
    "IntegrationError",
    "ModelValidationError",
    "SamplingError",
    "SingularMassMatrixError",
    "ErrorCode",
    "ValidationError",
    "format_error",
    # Logging
    "logger",
]
