"""
Control Subpackage

Certainty-equivalence adaptive tracking law and closed-loop diagnostics.
"""

from __future__ import annotations

from .controller import (
    ClosedLoopDiagnostics,
    ControllerGains,
    ControllerState,
    ControlSignals,
    agent_lyapunov,
    central_difference,
    closed_loop_diagnostics,
    control_signals,
    reference_accel,
    reference_velocity,
    slip,
    theta_hat_rate,
    torque,
)

__all__ = [
    "ClosedLoopDiagnostics",
    "ControlSignals",
    "ControllerGains",
    "ControllerState",
    "agent_lyapunov",
    "central_difference",
    "closed_loop_diagnostics",
    "control_signals",
    "reference_accel",
    "reference_velocity",
    "slip",
    "theta_hat_rate",
    "torque",
]
