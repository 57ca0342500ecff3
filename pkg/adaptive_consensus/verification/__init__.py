"""
Verification Subpackage

Acceptance checks over run metrics and the run summary.
"""

from __future__ import annotations

from .acceptance import (
    AcceptanceThresholds,
    CheckResult,
    CheckStatus,
    RunSummary,
    evaluate_checks,
    format_check_table,
    is_non_increasing,
    summarize_run,
    verify_scenario,
)

__all__ = [
    "AcceptanceThresholds",
    "CheckResult",
    "CheckStatus",
    "RunSummary",
    "evaluate_checks",
    "format_check_table",
    "is_non_increasing",
    "summarize_run",
    "verify_scenario",
]
