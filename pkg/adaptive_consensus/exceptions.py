"""Typed exceptions for the adaptive consensus library."""

from __future__ import annotations

from typing import Any

from .errors import ErrorCode, ValidationError


class ConsensusError(Exception):
    """Base exception for library errors.

    Subclasses set a default ``error_code``; a specific code may be passed
    per instance so one exception type covers a whole error category.
    """

    error_code: ErrorCode = ErrorCode.INVALID_PARAMETER

    def __init__(
        self,
        message: str,
        *,
        code: ErrorCode | None = None,
        location: dict[str, Any] | None = None,
        suggestion: str | None = None,
    ) -> None:
        if code is not None:
            self.error_code = code
        self.message = message
        self.location = dict(location) if location else {}
        self.suggestion = suggestion
        super().__init__(message)

    @property
    def error(self) -> ValidationError:
        """Structured record for JSON reporting."""
        return ValidationError(
            code=self.error_code,
            message=self.message,
            location=self.location,
            suggestion=self.suggestion,
        )


class GraphValidationError(ConsensusError):
    """Raised when a communication digraph is malformed."""

    error_code = ErrorCode.NODE_OUT_OF_RANGE


class ModelValidationError(ConsensusError):
    """Raised when a leader, plant or gain model violates its invariants."""

    error_code = ErrorCode.INVALID_PARAMETER


class ConfigError(ConsensusError):
    """Raised when a scenario file cannot be loaded or validated."""

    error_code = ErrorCode.INVALID_VALUE


class IntegrationError(ConsensusError):
    """Raised when an integrator stage produces a non-finite value."""

    error_code = ErrorCode.INTEGRATION_FAILED

    def __init__(self, t: float, component: str, stage: int) -> None:
        self.t = t
        self.component = component
        self.stage = stage
        super().__init__(
            f"Non-finite derivative at t={t:.6g} in {component} (RK4 stage {stage})",
            location={"t": t, "component": component, "stage": stage},
            suggestion="Reduce the step size or check gains and initial conditions",
        )


class SingularMassMatrixError(ConsensusError):
    """Raised when an inertia matrix is too ill-conditioned to invert."""

    error_code = ErrorCode.SINGULAR_MASS_MATRIX


class SamplingError(ConsensusError):
    """Raised when a sampled signal cannot support a Gram computation."""

    error_code = ErrorCode.INSUFFICIENT_SAMPLES
