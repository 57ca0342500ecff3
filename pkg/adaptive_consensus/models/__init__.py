"""
Models Subpackage

Leader exosystem, persistent-excitation test and Euler-Lagrange followers.
"""

from __future__ import annotations

from .excitation import PEReport, default_pe_epsilon, leader_pe_report, pe_gram
from .leader import (
    LeaderModel,
    LeaderPropagator,
    build_s,
    check_assumption3,
    leader_closed_form,
    leader_output,
    leader_trajectory,
    rotate_pairs,
    skew_apply,
)
from .plant import (
    STANDARD_GRAVITY,
    ArmParams,
    PlantState,
    TwoLinkArm,
    coriolis_matrix,
    gravity_vector,
    mass_matrix,
    plant_accel,
    regressor,
)

__all__ = [
    # Leader
    "LeaderModel",
    "LeaderPropagator",
    "build_s",
    "check_assumption3",
    "leader_closed_form",
    "leader_output",
    "leader_trajectory",
    "rotate_pairs",
    "skew_apply",
    # Excitation
    "PEReport",
    "default_pe_epsilon",
    "leader_pe_report",
    "pe_gram",
    # Plant
    "STANDARD_GRAVITY",
    "ArmParams",
    "PlantState",
    "TwoLinkArm",
    "coriolis_matrix",
    "gravity_vector",
    "mass_matrix",
    "plant_accel",
    "regressor",
]
