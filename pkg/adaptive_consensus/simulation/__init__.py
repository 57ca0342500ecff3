"""
Simulation Subpackage

Scenario description, fixed-step integration of the coupled network,
run metrics, CSV recording and the built-in scenarios.
"""

from __future__ import annotations

from .builtin import (
    BUILTIN_SCENARIOS,
    ARM_THETAS,
    builtin_observer_scenario,
    builtin_scenario,
    builtin_section5_scenario,
    builtin_two_link_scenario,
)
from .engine import StateLayout, build_rhs, initial_state, run_scenario, state_layout
from .integrator import integrate, rk4_step
from .metrics import (
    AgentMetrics,
    MetricWindows,
    RunMetrics,
    SettlingThresholds,
    compute_metrics,
    settling_time,
)
from .recorder import read_csv, write_summary, write_trajectory
from .seeding import SplitMix64
from .scenario import (
    AgentSpec,
    IntegrationSettings,
    RandomUniform,
    Scenario,
    ScenarioMode,
    scenario_with,
)
from .trajectory import Trajectory

__all__ = [
    # Scenario
    "AgentSpec",
    "IntegrationSettings",
    "RandomUniform",
    "Scenario",
    "ScenarioMode",
    "scenario_with",
    # Engine
    "StateLayout",
    "Trajectory",
    "build_rhs",
    "initial_state",
    "integrate",
    "rk4_step",
    "run_scenario",
    "state_layout",
    # Metrics
    "AgentMetrics",
    "MetricWindows",
    "RunMetrics",
    "SettlingThresholds",
    "compute_metrics",
    "settling_time",
    # Recording
    "read_csv",
    "write_summary",
    "write_trajectory",
    # Built-in scenarios
    "BUILTIN_SCENARIOS",
    "ARM_THETAS",
    "builtin_observer_scenario",
    "builtin_scenario",
    "builtin_section5_scenario",
    "builtin_two_link_scenario",
    # Seeding
    "SplitMix64",
]
