"""
Certainty-Equivalence Adaptive Tracking Law

Each follower replaces the unknown leader state, leader frequencies and
its own physical parameters by their current estimates:

    q̇_ri = CS(ω_i)η_i − α(q_i − Cη_i)
    s_i  = q̇_i − q̇_ri
    q̈_ri = CS(ω_i)η̇_i + CS(ω̇_i)η_i − α(q̇_i − Cη̇_i)
    τ_i  = −K_i s_i + Y_i Θ̂_i,        Y_i = Y(q_i, q̇_i, q̈_ri, q̇_ri)
    Θ̂̇_i = −Λ_i⁻¹ Y_iᵀ s_i

With Θ̃_i = Θ̂_i − Θ_i the closed loop satisfies M ṡ = −(C + K)s + YΘ̃ and
V_i = ½(sᵀMs + Θ̃ᵀΛΘ̃) has V̇_i = −sᵀKs.  The position error
e_i = q_i − Cη_i obeys ė_i + αe_i = s_i − μ1·C·e_vi.

All functions are batched over leading (agent, sample) axes.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .._types import EulerLagrangePlant, FloatArray
from ..errors import ErrorCode
from ..exceptions import ModelValidationError
from ..models.leader import skew_apply

if TYPE_CHECKING:
    from ..simulation.scenario import Scenario
    from ..simulation.trajectory import Trajectory

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE: float = 1e-12


def _gain_matrix(value: float | Sequence[Sequence[float]] | FloatArray, size: int) -> FloatArray:
    arr = np.array(value, dtype=float)
    if arr.ndim == 0:
        return float(arr) * np.eye(size)
    return arr


def _diagonal_gain(value: float | Sequence[float] | FloatArray, size: int) -> FloatArray:
    arr = np.array(value, dtype=float)
    if arr.ndim == 0:
        return float(arr) * np.eye(size)
    if arr.ndim == 1:
        return np.diag(arr)
    return arr


@dataclass(frozen=True, eq=False)
class ControllerGains:
    """Observer and controller gains shared by every follower.

    Attributes:
        alpha: Position-error gain α > 0.
        k_gain: Feedback matrix K, symmetric positive definite, n×n.
        lambda_gain: Adaptation matrix Λ, diagonal positive, p×p.
        mu1: Observer state gain μ1 > 0.
        mu2: Observer frequency gain μ2 > 0.
    """

    alpha: float
    k_gain: FloatArray
    lambda_gain: FloatArray
    mu1: float
    mu2: float

    def __post_init__(self) -> None:
        for name in ("alpha", "mu1", "mu2"):
            value = float(getattr(self, name))
            if not (np.isfinite(value) and value > 0):
                raise ModelValidationError(
                    f"{name} must be positive, got {value}",
                    location={"field": name},
                )
            object.__setattr__(self, name, value)

        k_gain = np.array(self.k_gain, dtype=float)
        if k_gain.ndim != 2 or k_gain.shape[0] != k_gain.shape[1]:
            raise ModelValidationError(
                f"K must be a square matrix, got shape {k_gain.shape}",
                code=ErrorCode.DIMENSION_MISMATCH,
                location={"field": "K"},
            )
        if not np.all(np.isfinite(k_gain)) or not np.allclose(
            k_gain, k_gain.T, rtol=0.0, atol=SYMMETRY_TOLERANCE
        ):
            raise ModelValidationError(
                "K must be finite and symmetric",
                code=ErrorCode.NOT_POSITIVE_DEFINITE,
                location={"field": "K"},
            )
        if float(np.linalg.eigvalsh(k_gain)[0]) <= 0:
            raise ModelValidationError(
                f"K must be positive definite (minimum eigenvalue "
                f"{float(np.linalg.eigvalsh(k_gain)[0]):.3g})",
                code=ErrorCode.NOT_POSITIVE_DEFINITE,
                location={"field": "K"},
            )

        lambda_gain = np.array(self.lambda_gain, dtype=float)
        if lambda_gain.ndim != 2 or lambda_gain.shape[0] != lambda_gain.shape[1]:
            raise ModelValidationError(
                f"Lambda must be a square matrix, got shape {lambda_gain.shape}",
                code=ErrorCode.DIMENSION_MISMATCH,
                location={"field": "Lambda"},
            )
        diagonal = np.diag(lambda_gain)
        if np.any(lambda_gain - np.diag(diagonal)) or not np.all(diagonal > 0):
            raise ModelValidationError(
                "Lambda must be diagonal with positive entries",
                code=ErrorCode.NOT_POSITIVE_DEFINITE,
                location={"field": "Lambda"},
            )
        for name, arr in (("k_gain", k_gain), ("lambda_gain", lambda_gain)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def build(
        cls,
        alpha: float,
        k_gain: float | Sequence[Sequence[float]] | FloatArray,
        lambda_gain: float | Sequence[float] | FloatArray,
        mu1: float,
        mu2: float,
        *,
        dof: int,
        param_dim: int,
    ) -> ControllerGains:
        """Accept K as a scalar (k·I) or matrix and Λ as a scalar, diagonal list or matrix."""
        gains = cls(
            alpha=alpha,
            k_gain=_gain_matrix(k_gain, dof),
            lambda_gain=_diagonal_gain(lambda_gain, param_dim),
            mu1=mu1,
            mu2=mu2,
        )
        if gains.dof != dof or gains.param_dim != param_dim:
            raise ModelValidationError(
                f"Gains must be {dof}x{dof} (K) and {param_dim}x{param_dim} (Lambda), got "
                f"{gains.k_gain.shape} and {gains.lambda_gain.shape}",
                code=ErrorCode.DIMENSION_MISMATCH,
            )
        return gains

    @property
    def dof(self) -> int:
        return int(self.k_gain.shape[0])

    @property
    def param_dim(self) -> int:
        return int(self.lambda_gain.shape[0])

    @property
    def lambda_diagonal(self) -> FloatArray:
        return np.diag(self.lambda_gain)

    def to_dict(self) -> dict[str, object]:
        return {
            "mu1": self.mu1,
            "mu2": self.mu2,
            "alpha": self.alpha,
            "K": self.k_gain.tolist(),
            "Lambda": self.lambda_diagonal.tolist(),
        }


@dataclass(frozen=True, eq=False)
class ControllerState:
    """Parameter estimates Θ̂_i, shape (N, p)."""

    theta_hat: FloatArray

    def __post_init__(self) -> None:
        theta_hat = np.array(self.theta_hat, dtype=float)
        if theta_hat.ndim != 2:
            raise ModelValidationError(
                f"theta_hat must be (N, p), got shape {theta_hat.shape}",
                code=ErrorCode.DIMENSION_MISMATCH,
            )
        if not np.all(np.isfinite(theta_hat)):
            raise ModelValidationError("theta_hat must be finite")
        object.__setattr__(self, "theta_hat", theta_hat)


# ---------------------------------------------------------------------------
# Control law
# ---------------------------------------------------------------------------


def reference_velocity(
    q: FloatArray,
    eta: FloatArray,
    omega_hat: FloatArray,
    c_out: FloatArray,
    alpha: float,
) -> FloatArray:
    """q̇_r = CS(ω̂)η − α(q − Cη)."""
    return skew_apply(omega_hat, eta) @ c_out.T - alpha * (q - eta @ c_out.T)


def slip(q_dot: FloatArray, q_r_dot: FloatArray) -> FloatArray:
    return q_dot - q_r_dot


def reference_accel(
    q_dot: FloatArray,
    eta: FloatArray,
    eta_dot: FloatArray,
    omega_hat: FloatArray,
    omega_hat_dot: FloatArray,
    c_out: FloatArray,
    alpha: float,
) -> FloatArray:
    """q̈_r = CS(ω̂)η̇ + CS(ω̂̇)η − α(q̇ − Cη̇), with derivatives from the same stage."""
    feedforward = (skew_apply(omega_hat, eta_dot) + skew_apply(omega_hat_dot, eta)) @ c_out.T
    return feedforward - alpha * (q_dot - eta_dot @ c_out.T)


def torque(
    s: FloatArray, y: FloatArray, theta_hat: FloatArray, k_gain: FloatArray
) -> FloatArray:
    """τ = −Ks + YΘ̂."""
    return -s @ k_gain.T + (y @ theta_hat[..., None])[..., 0]


def theta_hat_rate(s: FloatArray, y: FloatArray, lambda_gain: FloatArray) -> FloatArray:
    """Θ̂̇ = −Λ⁻¹Yᵀs for diagonal Λ."""
    return -(s[..., None, :] @ y)[..., 0, :] / np.diag(lambda_gain)


def agent_lyapunov(
    plant: EulerLagrangePlant,
    q: FloatArray,
    s: FloatArray,
    theta: FloatArray,
    theta_hat: FloatArray,
    lambda_gain: FloatArray,
) -> FloatArray:
    """V_i = ½(sᵀM(q)s + Θ̃ᵀΛΘ̃)."""
    kinetic = (s[..., None, :] @ plant.mass_matrix(q, theta) @ s[..., None])[..., 0, 0]
    theta_tilde = theta_hat - theta
    return 0.5 * (kinetic + np.sum(theta_tilde * theta_tilde * np.diag(lambda_gain), axis=-1))


@dataclass(frozen=True, eq=False)
class ControlSignals:
    """Every intermediate of one evaluation of the control law."""

    q_r_dot: FloatArray
    q_r_ddot: FloatArray
    s: FloatArray
    regressor: FloatArray
    tau: FloatArray
    theta_hat_dot: FloatArray


def control_signals(
    plant: EulerLagrangePlant,
    q: FloatArray,
    q_dot: FloatArray,
    eta: FloatArray,
    eta_dot: FloatArray,
    omega_hat: FloatArray,
    omega_hat_dot: FloatArray,
    theta_hat: FloatArray,
    c_out: FloatArray,
    gains: ControllerGains,
) -> ControlSignals:
    """Evaluate the full law; the regressor is Y(q, q̇, a=q̈_r, b=q̇_r)."""
    q_r_dot = reference_velocity(q, eta, omega_hat, c_out, gains.alpha)
    q_r_ddot = reference_accel(q_dot, eta, eta_dot, omega_hat, omega_hat_dot, c_out, gains.alpha)
    s = slip(q_dot, q_r_dot)
    y = plant.regressor(q, q_dot, q_r_ddot, q_r_dot)
    return ControlSignals(
        q_r_dot=q_r_dot,
        q_r_ddot=q_r_ddot,
        s=s,
        regressor=y,
        tau=torque(s, y, theta_hat, gains.k_gain),
        theta_hat_dot=theta_hat_rate(s, y, gains.lambda_gain),
    )


# ---------------------------------------------------------------------------
# Closed-loop diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ClosedLoopDiagnostics:
    """Per-sample, per-agent closed-loop series, leading axes (K, N).

    Attributes:
        e: Position error against the local estimate, q_i − Cη_i.
        e_dot: Five-point central difference of the recorded e; NaN where
            the stencil does not fit on a uniform stretch of the grid.
        s: Slip variable.
        lyapunov: V_i.
        position_error: q_i − q0.
        velocity_error: q̇_i − q̇0.
        identity_residual: ‖ė_i + αe_i − s_i + μ1·C·e_vi‖∞ with ė_i from
            ``e_dot``; NaN where ``e_dot`` is.
    """

    e: FloatArray
    e_dot: FloatArray
    s: FloatArray
    lyapunov: FloatArray
    position_error: FloatArray
    velocity_error: FloatArray
    identity_residual: FloatArray

    @property
    def max_identity_residual(self) -> float:
        finite = self.identity_residual[np.isfinite(self.identity_residual)]
        return float(np.max(finite)) if finite.size else 0.0


# Relative tolerance for declaring two recording intervals equal.
GRID_TOLERANCE: float = 1e-9


def central_difference(times: FloatArray, series: FloatArray) -> FloatArray:
    """Fourth-order central difference of ``series`` along axis 0.

    (x_{k−2} − 8x_{k−1} + 8x_{k+1} − x_{k+2}) / 12Δ, defined where the four
    surrounding intervals all equal Δ.  Other samples are NaN.
    """
    times = np.asarray(times, dtype=float)
    out = np.full(series.shape, np.nan)
    if times.size < 5:
        return out
    dt = np.diff(times)
    window = np.lib.stride_tricks.sliding_window_view(dt, 4)
    uniform = np.all(np.abs(window - window[:, :1]) <= GRID_TOLERANCE * window[:, :1], axis=1)
    stencil = (series[:-4] - 8.0 * series[1:-3] + 8.0 * series[3:-1] - series[4:]) / (
        12.0 * window[:, 0].reshape(-1, *([1] * (series.ndim - 1)))
    )
    interior = out[2:-2]
    interior[uniform] = stencil[uniform]
    return out


def closed_loop_diagnostics(trajectory: Trajectory, scenario: Scenario) -> ClosedLoopDiagnostics:
    """Recompute e, s, V_i and the error identity residual from a recording.

    ė is differentiated numerically from the recorded e, independently of
    the observer and controller rates, so the residual measures how well the
    integrated trajectory satisfies ė + αe = s − μ1·C·e_v.  Its truncation
    error scales with the fourth power of the recording interval.

    Raises:
        ModelValidationError: If the trajectory has no plant series
            (observer-only run).
    """
    if trajectory.q is None or trajectory.q_dot is None or trajectory.theta_hat is None:
        raise ModelValidationError(
            "Closed-loop diagnostics need plant and controller series",
            location={"mode": trajectory.mode.value},
        )
    c_out = scenario.leader.c_out
    gains = scenario.gains
    e_v = scenario.graph.coupling.disagreement(trajectory.eta, trajectory.leader_state)
    q, q_dot = trajectory.q, trajectory.q_dot
    e = q - trajectory.eta @ c_out.T
    e_dot = central_difference(trajectory.times, e)
    s = slip(q_dot, reference_velocity(q, trajectory.eta, trajectory.omega_hat, c_out, gains.alpha))
    residual = e_dot + gains.alpha * e - s + gains.mu1 * (e_v @ c_out.T)
    return ClosedLoopDiagnostics(
        e=e,
        e_dot=e_dot,
        s=s,
        lyapunov=agent_lyapunov(
            scenario.plant, q, s, scenario.thetas, trajectory.theta_hat, gains.lambda_gain
        ),
        position_error=q - trajectory.leader_output[:, None, :],
        velocity_error=q_dot - trajectory.leader_velocity[:, None, :],
        identity_residual=np.max(np.abs(residual), axis=-1),
    )
