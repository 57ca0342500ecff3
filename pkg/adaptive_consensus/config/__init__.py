"""
Config Subpackage

Scenario file loading, validation and canonical dumping.
"""

from __future__ import annotations

from .loader import dump_scenario, load_scenario, parse_scenario, scenario_to_dict

__all__ = ["dump_scenario", "load_scenario", "parse_scenario", "scenario_to_dict"]
