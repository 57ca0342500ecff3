"""
Euler-Lagrange Followers

Two-link planar arm with unknown parameter vector Θ = col(a1, …, a5):

    M(q) = [[a1 + a2 + 2 a3 cos q2,  a2 + a3 cos q2],
            [a2 + a3 cos q2,         a2            ]]
    C(q, q̇) = [[-a3 sin q2 q̇2,  -a3 sin q2 (q̇1 + q̇2)],
               [ a3 sin q2 q̇1,   0                   ]]
    G(q) = [a4 g cos q1 + a5 g cos(q1 + q2),  a5 g cos(q1 + q2)]

Every function is batched over leading axes so a whole network of arms is
evaluated with one call.  The regressor satisfies
M(q)a + C(q, q̇)b + G(q) = Y(q, q̇, a, b)Θ for all a, b.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .._types import FloatArray
from ..errors import ErrorCode
from ..exceptions import ModelValidationError, SingularMassMatrixError

logger = logging.getLogger(__name__)

STANDARD_GRAVITY: float = 9.8
ARM_DOF: int = 2
ARM_PARAM_DIM: int = 5

MAX_CONDITION_NUMBER: float = 1e12

# q2 grid used to certify that M(q) is positive definite for all q.
_PD_GRID_POINTS: int = 720


def _batch_shape(*shapes: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(np.broadcast_shapes(*shapes))


def mass_matrix(q: FloatArray, theta: FloatArray) -> FloatArray:
    a1, a2, a3 = theta[..., 0], theta[..., 1], theta[..., 2]
    c2 = np.cos(q[..., 1])
    off = a2 + a3 * c2
    out = np.empty((*_batch_shape(q.shape[:-1], theta.shape[:-1]), 2, 2))
    out[..., 0, 0] = a1 + a2 + 2.0 * a3 * c2
    out[..., 0, 1] = off
    out[..., 1, 0] = off
    out[..., 1, 1] = a2
    return out


def mass_matrix_rate(q: FloatArray, q_dot: FloatArray, theta: FloatArray) -> FloatArray:
    """Ṁ(q) = (∂M/∂q2)·q̇2."""
    rate = -theta[..., 2] * np.sin(q[..., 1]) * q_dot[..., 1]
    out = np.zeros((*np.shape(rate), 2, 2))
    out[..., 0, 0] = 2.0 * rate
    out[..., 0, 1] = rate
    out[..., 1, 0] = rate
    return out


def coriolis_matrix(q: FloatArray, q_dot: FloatArray, theta: FloatArray) -> FloatArray:
    h = theta[..., 2] * np.sin(q[..., 1])
    out = np.zeros((*_batch_shape(np.shape(h), q_dot.shape[:-1]), 2, 2))
    out[..., 0, 0] = -h * q_dot[..., 1]
    out[..., 0, 1] = -h * (q_dot[..., 0] + q_dot[..., 1])
    out[..., 1, 0] = h * q_dot[..., 0]
    return out


def gravity_vector(
    q: FloatArray, theta: FloatArray, gravity: float | FloatArray = STANDARD_GRAVITY
) -> FloatArray:
    g = np.asarray(gravity, dtype=float)
    distal = theta[..., 4] * g * np.cos(q[..., 0] + q[..., 1])
    return np.stack((theta[..., 3] * g * np.cos(q[..., 0]) + distal, distal), axis=-1)


def regressor(
    q: FloatArray,
    q_dot: FloatArray,
    a: FloatArray,
    b: FloatArray,
    gravity: float | FloatArray = STANDARD_GRAVITY,
) -> FloatArray:
    """Y(q, q̇, a, b) with shape (…, 2, 5); independent of Θ."""
    g = np.asarray(gravity, dtype=float)
    c2, s2 = np.cos(q[..., 1]), np.sin(q[..., 1])
    qd1, qd2 = q_dot[..., 0], q_dot[..., 1]
    a1, a2 = a[..., 0], a[..., 1]
    b1, b2 = b[..., 0], b[..., 1]
    shape = _batch_shape(q.shape[:-1], q_dot.shape[:-1], a.shape[:-1], b.shape[:-1], g.shape)
    out = np.zeros((*shape, 2, 5))
    out[..., 0, 0] = a1
    out[..., 0, 1] = a1 + a2
    out[..., 1, 1] = out[..., 0, 1]
    out[..., 0, 2] = c2 * (2.0 * a1 + a2) - s2 * (qd2 * b1 + (qd1 + qd2) * b2)
    out[..., 1, 2] = c2 * a1 + s2 * qd1 * b1
    out[..., 0, 3] = g * np.cos(q[..., 0])
    out[..., 0, 4] = g * np.cos(q[..., 0] + q[..., 1])
    out[..., 1, 4] = out[..., 0, 4]
    return out


def kinetic_energy(q: FloatArray, q_dot: FloatArray, theta: FloatArray) -> FloatArray:
    """½q̇ᵀM(q)q̇."""
    m_q_dot = (mass_matrix(q, theta) @ q_dot[..., None])[..., 0]
    return 0.5 * np.sum(q_dot * m_q_dot, axis=-1)


def plant_accel(
    q: FloatArray,
    q_dot: FloatArray,
    tau: FloatArray,
    theta: FloatArray,
    gravity: float | FloatArray = STANDARD_GRAVITY,
) -> FloatArray:
    """q̈ = M(q)⁻¹(τ − C(q, q̇)q̇ − G(q)) by the closed-form 2×2 inverse.

    Raises:
        SingularMassMatrixError: If any M(q) is not positive definite or its
            condition number exceeds ``MAX_CONDITION_NUMBER``.
    """
    a1, a2, a3 = theta[..., 0], theta[..., 1], theta[..., 2]
    c2, s2 = np.cos(q[..., 1]), np.sin(q[..., 1])
    m11 = a1 + a2 + 2.0 * a3 * c2
    m12 = a2 + a3 * c2
    det = m11 * a2 - m12 * m12
    # Largest eigenvalue; cond(M) = hi² / det.
    hi = 0.5 * (m11 + a2) + np.sqrt(0.25 * (m11 - a2) ** 2 + m12 * m12)
    if not np.all((hi > 0) & (hi * hi < MAX_CONDITION_NUMBER * det)):
        ratio = det / (hi * hi)
        worst = int(np.argmin(np.reshape(ratio, -1)))
        at = np.broadcast_to(q, (*np.shape(ratio), q.shape[-1])).reshape(-1, q.shape[-1])
        raise SingularMassMatrixError(
            "Inertia matrix is singular or ill-conditioned",
            location={"agent_index": worst, "q": at[worst].tolist()},
        )
    g = np.asarray(gravity, dtype=float)
    qd1, qd2 = q_dot[..., 0], q_dot[..., 1]
    h = a3 * s2
    distal = theta[..., 4] * g * np.cos(q[..., 0] + q[..., 1])
    r1 = tau[..., 0] + h * qd2 * (2.0 * qd1 + qd2) - theta[..., 3] * g * np.cos(q[..., 0]) - distal
    r2 = tau[..., 1] - h * qd1 * qd1 - distal
    out = np.empty((*np.broadcast_shapes(np.shape(r1), np.shape(det)), 2))
    out[..., 0] = (a2 * r1 - m12 * r2) / det
    out[..., 1] = (m11 * r2 - m12 * r1) / det
    return out


@dataclass(frozen=True, slots=True, eq=False)
class PlantState:
    """Generalized position (rad) and velocity (rad/s) of one follower."""

    q: FloatArray
    q_dot: FloatArray

    def __post_init__(self) -> None:
        q = np.array(self.q, dtype=float)
        q_dot = np.array(self.q_dot, dtype=float)
        if q.shape != q_dot.shape or q.ndim != 1:
            raise ModelValidationError(
                f"q and q_dot must be vectors of equal length, got {q.shape} and {q_dot.shape}",
                code=ErrorCode.DIMENSION_MISMATCH,
            )
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(q_dot))):
            raise ModelValidationError("Plant state must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "q_dot", q_dot)


@dataclass(frozen=True, eq=False)
class ArmParams:
    """Parameter vector Θ of one two-link arm plus its gravity constant."""

    theta: FloatArray
    gravity: float = STANDARD_GRAVITY

    def __post_init__(self) -> None:
        theta = np.array(self.theta, dtype=float)
        if theta.shape != (ARM_PARAM_DIM,):
            raise ModelValidationError(
                f"theta must have {ARM_PARAM_DIM} entries, got shape {theta.shape}",
                code=ErrorCode.DIMENSION_MISMATCH,
                location={"field": "theta"},
            )
        if not (np.all(np.isfinite(theta)) and np.isfinite(self.gravity)):
            raise ModelValidationError("theta and gravity must be finite")
        if theta[0] <= 0 or theta[1] <= 0:
            raise ModelValidationError(
                f"a1 and a2 must be positive, got {theta[:2].tolist()}",
                location={"field": "theta"},
            )
        grid = np.linspace(0.0, 2.0 * np.pi, _PD_GRID_POINTS)
        q = np.column_stack((np.zeros_like(grid), grid))
        lowest = float(np.min(np.linalg.eigvalsh(mass_matrix(q, theta))[:, 0]))
        if lowest <= 0:
            raise ModelValidationError(
                f"M(q) is not positive definite for theta={theta.tolist()} "
                f"(minimum eigenvalue {lowest:.3g})",
                code=ErrorCode.NOT_POSITIVE_DEFINITE,
                location={"field": "theta"},
                suggestion="Require a1*a2 > a3**2 for the two-link arm",
            )
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "gravity", float(self.gravity))


class TwoLinkArm:
    """Two-link arm bound to a gravity constant (scalar or one per agent).

    Satisfies :class:`~adaptive_consensus._types.EulerLagrangePlant`.
    """

    dof = ARM_DOF
    param_dim = ARM_PARAM_DIM

    def __init__(self, gravity: float | FloatArray = STANDARD_GRAVITY) -> None:
        self.gravity = np.asarray(gravity, dtype=float)

    def mass_matrix(self, q: FloatArray, theta: FloatArray) -> FloatArray:
        return mass_matrix(q, theta)

    def coriolis_matrix(
        self, q: FloatArray, q_dot: FloatArray, theta: FloatArray
    ) -> FloatArray:
        return coriolis_matrix(q, q_dot, theta)

    def gravity_vector(self, q: FloatArray, theta: FloatArray) -> FloatArray:
        return gravity_vector(q, theta, self.gravity)

    def regressor(
        self, q: FloatArray, q_dot: FloatArray, a: FloatArray, b: FloatArray
    ) -> FloatArray:
        return regressor(q, q_dot, a, b, self.gravity)

    def accel(
        self, q: FloatArray, q_dot: FloatArray, tau: FloatArray, theta: FloatArray
    ) -> FloatArray:
        return plant_accel(q, q_dot, tau, theta, self.gravity)
