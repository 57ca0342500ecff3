"""
Shared pytest fixtures for adaptive_consensus tests.

Provides the built-in scenarios and a scenario file writer.
"""

from __future__ import annotations

import sys
from collections.abc import Callable
from pathlib import Path

import pytest
import yaml

# Ensure adaptive_consensus is importable from the repo root
sys.path.insert(0, str(Path(__file__).parent.parent))

from adaptive_consensus.config import scenario_to_dict
from adaptive_consensus.simulation.builtin import builtin_observer_scenario, builtin_two_link_scenario
from adaptive_consensus.simulation.scenario import Scenario

# =============================================================================
# Shared fixtures
# =============================================================================


@pytest.fixture
def two_link_scenario() -> Scenario:
    """The six-arm closed-loop scenario with seed 42."""
    return builtin_two_link_scenario(seed=42)


@pytest.fixture
def observer_scenario() -> Scenario:
    """The observer-only variant of the six-arm scenario."""
    return builtin_observer_scenario(seed=42)


@pytest.fixture
def scenario_document(two_link_scenario: Scenario) -> dict:
    """Plain-data form of the built-in scenario, safe to mutate."""
    return scenario_to_dict(two_link_scenario)


@pytest.fixture
def write_scenario(tmp_path: Path) -> Callable[[dict], Path]:
    """Write a scenario mapping to a YAML file under tmp_path."""

    def _write(document: dict, name: str = "scenario.yaml") -> Path:
        path = tmp_path / name
        path.write_text(yaml.safe_dump(document, sort_keys=False), encoding="utf-8")
        return path

    return _write
