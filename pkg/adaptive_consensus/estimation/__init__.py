"""
Estimation Subpackage

Adaptive distributed observer for the uncertain leader, its baselines,
the φ-operator and the observer Lyapunov monitor.
"""

from __future__ import annotations

from .observer import (
    ObserverErrors,
    ObserverRates,
    ObserverState,
    ObserverVariant,
    known_frequency_observer_rhs,
    laplacian_disagreement,
    neighbor_disagreement,
    observer_errors,
    observer_lyapunov,
    observer_lyapunov_series,
    observer_rates,
    observer_rhs,
    phi,
    phi_apply,
    s_of,
    stacked_disagreement,
)

__all__ = [
    "ObserverErrors",
    "ObserverRates",
    "ObserverState",
    "ObserverVariant",
    "known_frequency_observer_rhs",
    "laplacian_disagreement",
    "neighbor_disagreement",
    "observer_errors",
    "observer_lyapunov",
    "observer_lyapunov_series",
    "observer_rates",
    "observer_rhs",
    "phi",
    "phi_apply",
    "s_of",
    "stacked_disagreement",
]
