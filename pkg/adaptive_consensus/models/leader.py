"""
Harmonic Leader

The uncertain exosystem v̇ = S(ω)v, q0 = Cv with S(ω) block-diagonal in
2×2 rotation generators.  Trajectories are evaluated in closed form, which
is also how the leader state enters the consensus sums during simulation.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .._types import AssumptionCheck, FloatArray
from ..errors import ErrorCode
from ..exceptions import ModelValidationError

logger = logging.getLogger(__name__)

# The 2×2 generator a = [[0, 1], [-1, 0]].
ROTATION_GENERATOR: FloatArray = np.array([[0.0, 1.0], [-1.0, 0.0]])
ROTATION_GENERATOR.setflags(write=False)


def _as_vector(values: Sequence[float] | FloatArray, name: str) -> FloatArray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ModelValidationError(
            f"{name} must be a nonempty vector, got shape {arr.shape}",
            code=ErrorCode.DIMENSION_MISMATCH,
            location={"field": name},
        )
    if not np.all(np.isfinite(arr)):
        raise ModelValidationError(
            f"{name} must be finite", location={"field": name}
        )
    return arr


def build_s(omega: Sequence[float] | FloatArray) -> FloatArray:
    """S(ω) = diag(ω) ⊗ a.

    Entries are placed rather than computed, so the result is exactly
    skew-symmetric.  Zero or negative entries are allowed here; the leader
    model rejects them.
    """
    return np.kron(np.diag(_as_vector(omega, "omega")), ROTATION_GENERATOR)


# Per-pair signs of (I_l ⊗ a)x = (x_2, −x_1, x_4, −x_3, …).
_PAIR_SIGNS: FloatArray = np.array([1.0, -1.0])
_PAIR_SIGNS.setflags(write=False)


def rotate_pairs(x: FloatArray) -> FloatArray:
    """(I_l ⊗ a)x reshaped to (…, l, 2)."""
    return x.reshape(*x.shape[:-1], -1, 2)[..., ::-1] * _PAIR_SIGNS


def skew_apply(z: FloatArray, x: FloatArray) -> FloatArray:
    """Batched S(z)x over any leading axes of ``z`` (…, l) and ``x`` (…, 2l)."""
    out = np.asarray(z)[..., None] * rotate_pairs(x)
    return out.reshape(*out.shape[:-2], -1)


@dataclass(frozen=True, eq=False)
class LeaderModel:
    """Leader exosystem with unknown frequencies.

    Attributes:
        omega: Frequencies ω (rad/s), all strictly positive, length l.
        v0: Initial state v(0), length m = 2l.
        c_out: Output matrix C, shape (n, m).
    """

    omega: FloatArray
    v0: FloatArray
    c_out: FloatArray

    def __post_init__(self) -> None:
        omega = _as_vector(self.omega, "omega")
        v0 = _as_vector(self.v0, "v0")
        c_out = np.array(self.c_out, dtype=float)
        if np.any(omega <= 0):
            raise ModelValidationError(
                f"Leader frequencies must be strictly positive, got {omega.tolist()}",
                location={"field": "omega"},
            )
        if v0.size != 2 * omega.size:
            raise ModelValidationError(
                f"v0 must have dimension 2*len(omega) = {2 * omega.size}, got {v0.size}",
                code=ErrorCode.DIMENSION_MISMATCH,
                location={"field": "v0"},
            )
        if c_out.ndim != 2 or c_out.shape[1] != v0.size:
            raise ModelValidationError(
                f"C must be an n x {v0.size} matrix, got shape {c_out.shape}",
                code=ErrorCode.DIMENSION_MISMATCH,
                location={"field": "C"},
            )
        if not np.all(np.isfinite(c_out)):
            raise ModelValidationError("C must be finite", location={"field": "C"})
        for name, arr in (("omega", omega), ("v0", v0), ("c_out", c_out)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_amplitudes(
        cls,
        amplitudes: Sequence[float],
        phases: Sequence[float],
        omega: Sequence[float],
    ) -> LeaderModel:
        """Leader whose output is q0_k = A_k sin(ω_k t + φ_k)."""
        amps = np.asarray(amplitudes, dtype=float)
        phis = np.asarray(phases, dtype=float)
        if not amps.shape == phis.shape == (len(omega),):
            raise ModelValidationError(
                "amplitudes, phases and omega must have equal length",
                code=ErrorCode.DIMENSION_MISMATCH,
            )
        v0 = np.column_stack((amps * np.sin(phis), amps * np.cos(phis))).ravel()
        c_out = np.zeros((len(omega), 2 * len(omega)))
        c_out[np.arange(len(omega)), 2 * np.arange(len(omega))] = 1.0
        return cls(omega=np.asarray(omega, dtype=float), v0=v0, c_out=c_out)

    @property
    def l(self) -> int:  # noqa: E743
        return int(self.omega.size)

    @property
    def m(self) -> int:
        return int(self.v0.size)

    @property
    def n(self) -> int:
        return int(self.c_out.shape[0])

    @property
    def generator(self) -> FloatArray:
        return build_s(self.omega)

    def to_dict(self) -> dict[str, list]:
        return {
            "omega": self.omega.tolist(),
            "v0": self.v0.tolist(),
            "C": self.c_out.tolist(),
        }


def leader_closed_form(model: LeaderModel, t: float | FloatArray) -> FloatArray:
    """Exact leader state v(t) = exp(S(ω)t)v(0).

    Each block is rotated: v_k(t) = cos(ω_k t)·v_k(0) + sin(ω_k t)·a·v_k(0),
    so t = 0 returns v(0) exactly.  Accepts a scalar time (returns shape
    (m,)) or an array of times (returns shape t.shape + (m,)).
    """
    times = np.asarray(t, dtype=float)
    if np.any(times < 0):
        raise ModelValidationError(
            "Leader trajectory is defined for t >= 0", location={"t": float(np.min(times))}
        )
    return LeaderPropagator.of(model).state(times)


@dataclass(frozen=True, slots=True, eq=False)
class LeaderPropagator:
    """Closed-form v(t) with the per-call constants prepared once.

    The simulation engine evaluates the leader four times per RK4 step;
    :meth:`state` skips the validation done by :func:`leader_closed_form`.
    """

    pair_omega: FloatArray
    v0: FloatArray
    v0_rotated: FloatArray

    @classmethod
    def of(cls, model: LeaderModel) -> LeaderPropagator:
        return cls(
            pair_omega=np.repeat(model.omega, 2),
            v0=model.v0,
            v0_rotated=rotate_pairs(model.v0).reshape(-1),
        )

    def state(self, t: float | FloatArray) -> FloatArray:
        angle = np.multiply.outer(t, self.pair_omega)
        return np.cos(angle) * self.v0 + np.sin(angle) * self.v0_rotated


def leader_trajectory(model: LeaderModel, times: FloatArray) -> FloatArray:
    """Closed-form states on a time grid, shape (len(times), m)."""
    return leader_closed_form(model, np.asarray(times, dtype=float).ravel())


def leader_output(model: LeaderModel, v: FloatArray) -> tuple[FloatArray, FloatArray]:
    """Return (q0, q̇0) = (Cv, CS(ω)v); batched over leading axes of ``v``."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1:] != (model.m,):
        raise ModelValidationError(
            f"Leader state must have dimension {model.m}, got shape {v.shape}",
            code=ErrorCode.DIMENSION_MISMATCH,
        )
    q0 = v @ model.c_out.T
    q0_dot = skew_apply(model.omega, v) @ model.c_out.T
    return q0, q0_dot


def check_assumption3(model: LeaderModel) -> AssumptionCheck:
    """Distinct frequencies and a nonzero initial state in every 2-block.

    Under these conditions the leader state is persistently exciting and the
    frequency estimates converge to the true frequencies.
    """
    omega = model.omega.tolist()
    for i in range(len(omega)):
        for j in range(i + 1, len(omega)):
            if math.isclose(omega[i], omega[j], rel_tol=1e-12, abs_tol=0.0):
                return AssumptionCheck(
                    holds=False,
                    diagnostic=f"frequencies {i + 1} and {j + 1} coincide ({omega[i]})",
                    violation=ErrorCode.COINCIDENT_FREQUENCIES,
                )
    norms = np.hypot(model.v0[0::2], model.v0[1::2])
    zero_blocks = [k + 1 for k, norm in enumerate(norms) if norm == 0.0]
    if zero_blocks:
        return AssumptionCheck(
            holds=False,
            diagnostic=f"initial state is zero in block(s) {zero_blocks}",
            violation=ErrorCode.ZERO_EXCITATION_BLOCK,
        )
    return AssumptionCheck(
        holds=True,
        diagnostic="frequencies distinct and every block of v(0) nonzero",
    )
