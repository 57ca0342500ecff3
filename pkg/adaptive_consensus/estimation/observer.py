"""
Adaptive Distributed Observer

Each follower i keeps an estimate η_i of the leader state and ω_i of the
leader frequencies, using only its in-neighbors' estimates:

    η̇_i = S(ω_i)η_i + μ1·e_vi
    ω̇_i = μ2·φ(e_vi)η_i
    e_vi = Σ_{j∈N̄_i} a_ij (η_j − η_i),   η_0 = v

The φ-operator satisfies xᵀS(z)y = zᵀφ(x)y, which makes
V = ½(η̃ᵀ(H⊗I_m)η̃ + μ2⁻¹ω̃ᵀω̃) nonincreasing along solutions:
V̇ = −μ1‖e_v‖².

Two baselines that know ω (exactly, or at the leader's children only) share
the same state and error types for comparison runs.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from .._types import FloatArray
from ..errors import ErrorCode
from ..exceptions import ModelValidationError
from ..models.leader import build_s, skew_apply
from ..network.topology import CouplingMatrices, Digraph

logger = logging.getLogger(__name__)


class ObserverVariant(str, enum.Enum):
    """Observer laws sharing the integrator and error types."""

    ADAPTIVE = "adaptive"
    KNOWN_FREQUENCY = "known_frequency"
    FREQUENCY_CONSENSUS = "frequency_consensus"


# ---------------------------------------------------------------------------
# φ-operator
# ---------------------------------------------------------------------------


def phi(x: FloatArray) -> FloatArray:
    """φ(x): row k has −x_{2k} in column 2k−1 and x_{2k−1} in column 2k."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2 or x.size % 2:
        raise ModelValidationError(
            f"phi requires an even-dimensional vector, got shape {x.shape}",
            code=ErrorCode.ODD_DIMENSION,
        )
    half = x.size // 2
    out = np.zeros((half, x.size))
    rows = np.arange(half)
    out[rows, 2 * rows] = -x[1::2]
    out[rows, 2 * rows + 1] = x[0::2]
    return out


def phi_apply(x: FloatArray, y: FloatArray) -> FloatArray:
    """Batched φ(x)y over leading axes; result has shape (…, m/2)."""
    return x[..., 0::2] * y[..., 1::2] - x[..., 1::2] * y[..., 0::2]


def s_of(z: FloatArray) -> FloatArray:
    """S(z) for an arbitrary real vector (estimates may be negative)."""
    return build_s(z)


# ---------------------------------------------------------------------------
# State and error records
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ObserverState:
    """Stacked estimates of all followers.

    Attributes:
        eta: Leader-state estimates η_i, shape (N, m).
        omega_hat: Frequency estimates ω_i, shape (N, l) with m = 2l.
    """

    eta: FloatArray
    omega_hat: FloatArray

    def __post_init__(self) -> None:
        eta = np.array(self.eta, dtype=float)
        omega_hat = np.array(self.omega_hat, dtype=float)
        if eta.ndim != 2 or omega_hat.ndim != 2 or eta.shape != (
            omega_hat.shape[0],
            2 * omega_hat.shape[1],
        ):
            raise ModelValidationError(
                f"eta must be (N, 2l) and omega_hat (N, l), got {eta.shape} and "
                f"{omega_hat.shape}",
                code=ErrorCode.DIMENSION_MISMATCH,
            )
        if not (np.all(np.isfinite(eta)) and np.all(np.isfinite(omega_hat))):
            raise ModelValidationError("Observer state must be finite")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "omega_hat", omega_hat)

    @property
    def follower_count(self) -> int:
        return int(self.eta.shape[0])


@dataclass(frozen=True, eq=False)
class ObserverRates:
    """Time derivatives (η̇_i, ω̇_i) of all followers."""

    eta_dot: FloatArray
    omega_hat_dot: FloatArray


@dataclass(frozen=True, eq=False)
class ObserverErrors:
    """Estimation errors and the observer Lyapunov function value."""

    eta_tilde: FloatArray
    omega_tilde: FloatArray
    e_v: FloatArray
    lyapunov: float


# ---------------------------------------------------------------------------
# Disagreement terms
# ---------------------------------------------------------------------------


def neighbor_disagreement(g: Digraph, eta: FloatArray, v: FloatArray) -> FloatArray:
    """e_vi = Σ_{j∈N̄_i} a_ij (η_j − η_i) by explicit neighbor sums."""
    stacked = np.vstack((v, eta))
    e_v = np.zeros_like(eta)
    for i in range(1, g.node_count):
        for j in g.in_neighbors(i):
            e_v[i - 1] += g.weight(j, i) * (stacked[j] - stacked[i])
    return e_v


def stacked_disagreement(h: FloatArray, eta_tilde: FloatArray) -> FloatArray:
    """e_v = −(H ⊗ I_m)η̃ on the stacked error vector."""
    n, m = eta_tilde.shape
    return -(np.kron(h, np.eye(m)) @ eta_tilde.reshape(-1)).reshape(n, m)


def laplacian_disagreement(
    laplacian: FloatArray, estimates: FloatArray, leader_value: FloatArray
) -> FloatArray:
    """Row form of the neighbor sums: −(L̄ @ col(leader, estimates)) without row 0.

    Batched over leading axes of ``estimates`` (…, N, d); ``leader_value``
    broadcasts against (…, d).
    """
    head = np.broadcast_to(
        np.expand_dims(leader_value, -2), (*estimates.shape[:-2], 1, estimates.shape[-1])
    )
    return -(laplacian @ np.concatenate((head, estimates), axis=-2))[..., 1:, :]


def observer_lyapunov(
    h: FloatArray, eta_tilde: FloatArray, omega_tilde: FloatArray, mu2: float
) -> float:
    """V = ½(η̃ᵀ(H⊗I_m)η̃ + μ2⁻¹ω̃ᵀω̃)."""
    quadratic = float(np.sum(eta_tilde * (h @ eta_tilde)))
    return 0.5 * (quadratic + float(np.sum(omega_tilde * omega_tilde)) / mu2)


def observer_lyapunov_series(
    h: FloatArray, eta_tilde: FloatArray, omega_tilde: FloatArray, mu2: float
) -> FloatArray:
    """V over recorded samples; inputs have shapes (K, N, m) and (K, N, l)."""
    quadratic = np.sum(eta_tilde * (h @ eta_tilde), axis=(-2, -1))
    return 0.5 * (quadratic + np.sum(omega_tilde * omega_tilde, axis=(-2, -1)) / mu2)


# ---------------------------------------------------------------------------
# Right-hand sides
# ---------------------------------------------------------------------------


def observer_rates(
    variant: ObserverVariant,
    coupling: CouplingMatrices,
    eta: FloatArray,
    omega_hat: FloatArray,
    v: FloatArray,
    omega_true: FloatArray | None,
    mu1: float,
    mu2: float,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Batched (η̇, ω̇, e_v) for all followers; the engine's inner kernel.

    Leading sample axes of ``eta`` (…, N, m) and ``v`` (…, m) are carried
    through.  ``omega_true`` is only read by the baselines.
    """
    e_v = coupling.disagreement(eta, v)
    if variant is ObserverVariant.ADAPTIVE:
        eta_dot = skew_apply(omega_hat, eta) + mu1 * e_v
        return eta_dot, mu2 * phi_apply(e_v, eta), e_v
    if omega_true is None:
        raise ModelValidationError(f"The {variant.value} observer needs the true frequencies")
    if variant is ObserverVariant.KNOWN_FREQUENCY:
        eta_dot = skew_apply(omega_true, eta) + mu1 * e_v
        return eta_dot, np.zeros_like(omega_hat), e_v
    eta_dot = skew_apply(omega_hat, eta) + mu1 * e_v
    omega_dot = mu2 * coupling.disagreement(omega_hat, omega_true)
    return eta_dot, omega_dot, e_v


def _check_dimensions(state: ObserverState, v: FloatArray, g: Digraph) -> None:
    if state.follower_count != g.follower_count:
        raise ModelValidationError(
            f"Observer has {state.follower_count} followers but the graph has "
            f"{g.follower_count}",
            code=ErrorCode.DIMENSION_MISMATCH,
        )
    if np.shape(v) != (state.eta.shape[1],):
        raise ModelValidationError(
            f"Leader state must have dimension {state.eta.shape[1]}, got shape {np.shape(v)}",
            code=ErrorCode.DIMENSION_MISMATCH,
        )
    if not g.assumption1:
        logger.warning(
            "Observer evaluated on a graph failing the leader-rooted/undirected check: %s",
            g.assumption1.diagnostic,
        )


def _validate_gains(mu1: float, mu2: float) -> None:
    if mu1 <= 0 or mu2 <= 0:
        raise ModelValidationError(
            f"Observer gains must be positive, got mu1={mu1}, mu2={mu2}",
            location={"mu1": mu1, "mu2": mu2},
        )


def observer_rhs(
    state: ObserverState, v: FloatArray, g: Digraph, mu1: float, mu2: float
) -> ObserverRates:
    """Adaptive observer derivatives at leader state ``v``.

    A graph failing the leader-rooted/undirected check is evaluated anyway
    (with a warning) so negative scenarios can be simulated.
    """
    v = np.asarray(v, dtype=float)
    _check_dimensions(state, v, g)
    _validate_gains(mu1, mu2)
    eta_dot, omega_dot, _ = observer_rates(
        ObserverVariant.ADAPTIVE,
        g.coupling,
        state.eta,
        state.omega_hat,
        v,
        None,
        mu1,
        mu2,
    )
    return ObserverRates(eta_dot=eta_dot, omega_hat_dot=omega_dot)


def known_frequency_observer_rhs(
    variant: ObserverVariant,
    state: ObserverState,
    v: FloatArray,
    omega_true: FloatArray,
    g: Digraph,
    mu1: float,
    mu2: float,
) -> ObserverRates:
    """Baseline observers that rely on the true leader frequencies.

    ``KNOWN_FREQUENCY``: every follower uses S(ω); ω̇_i = 0.
    ``FREQUENCY_CONSENSUS``: followers run consensus on ω_i with ω_0 = ω, so
    only the leader's children read the true frequencies.
    """
    if variant is ObserverVariant.ADAPTIVE:
        raise ModelValidationError("Use observer_rhs for the adaptive observer")
    v = np.asarray(v, dtype=float)
    omega_true = np.asarray(omega_true, dtype=float)
    _check_dimensions(state, v, g)
    _validate_gains(mu1, mu2)
    if omega_true.shape != (state.omega_hat.shape[1],):
        raise ModelValidationError(
            f"omega_true must have dimension {state.omega_hat.shape[1]}",
            code=ErrorCode.DIMENSION_MISMATCH,
        )
    eta_dot, omega_dot, _ = observer_rates(
        variant, g.coupling, state.eta, state.omega_hat, v, omega_true, mu1, mu2
    )
    return ObserverRates(eta_dot=eta_dot, omega_hat_dot=omega_dot)


def observer_errors(
    state: ObserverState,
    v: FloatArray,
    omega_true: FloatArray,
    g: Digraph,
    mu2: float,
) -> ObserverErrors:
    """η̃_i = η_i − v, ω̃_i = ω_i − ω, neighbor-sum e_v and Lyapunov V."""
    v = np.asarray(v, dtype=float)
    eta_tilde = state.eta - v
    omega_tilde = state.omega_hat - np.asarray(omega_true, dtype=float)
    return ObserverErrors(
        eta_tilde=eta_tilde,
        omega_tilde=omega_tilde,
        e_v=neighbor_disagreement(g, state.eta, v),
        lyapunov=observer_lyapunov(g.coupling.h, eta_tilde, omega_tilde, mu2),
    )
