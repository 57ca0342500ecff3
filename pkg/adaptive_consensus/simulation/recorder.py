"""
Run Recorder

Lossless CSV emission of a trajectory (17 significant digits, comma
separated, one header line) plus the JSON run summary.

Files:
    leader.csv       t, v1..vm, q0_1..q0_n, q0dot_1..q0dot_n
    agent_<i>.csv    t, q1..qn, qdot1..qdotn, eta1..etam, omega1..omegal,
                     thetahat1..thetahatp, tau1..taun
                     (observer-only runs: t, eta1..etam, omega1..omegal)
    diagnostics.csv  t, V, V_1..V_N, etatilde_norm_1..N, omegatilde_norm_1..N,
                     ev_norm_1..N, e_norm_1..N
                     (observer-only runs omit the V_i and e_norm columns)
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from .._types import FloatArray
from .trajectory import Trajectory

logger = logging.getLogger(__name__)

CSV_FORMAT = "%.17g"


def _names(prefix: str, count: int, sep: str = "") -> list[str]:
    return [f"{prefix}{sep}{k}" for k in range(1, count + 1)]


def leader_table(trajectory: Trajectory) -> tuple[list[str], FloatArray]:
    m = trajectory.leader_state.shape[1]
    n = trajectory.leader_output.shape[1]
    header = ["t", *_names("v", m), *_names("q0", n, "_"), *_names("q0dot", n, "_")]
    data = np.column_stack(
        (
            trajectory.times,
            trajectory.leader_state,
            trajectory.leader_output,
            trajectory.leader_velocity,
        )
    )
    return header, data


def agent_table(trajectory: Trajectory, agent: int) -> tuple[list[str], FloatArray]:
    """Columns of follower ``agent`` (1-based)."""
    i = agent - 1
    m = trajectory.eta.shape[2]
    l = trajectory.omega_hat.shape[2]  # noqa: E741
    columns: list[FloatArray] = [trajectory.times]
    header = ["t"]
    if trajectory.q is not None and trajectory.q_dot is not None:
        n = trajectory.q.shape[2]
        header += [*_names("q", n), *_names("qdot", n)]
        columns += [trajectory.q[:, i], trajectory.q_dot[:, i]]
    header += [*_names("eta", m), *_names("omega", l)]
    columns += [trajectory.eta[:, i], trajectory.omega_hat[:, i]]
    if trajectory.theta_hat is not None and trajectory.tau is not None:
        header += [*_names("thetahat", trajectory.theta_hat.shape[2])]
        header += [*_names("tau", trajectory.tau.shape[2])]
        columns += [trajectory.theta_hat[:, i], trajectory.tau[:, i]]
    return header, np.column_stack(columns)


def diagnostics_table(trajectory: Trajectory) -> tuple[list[str], FloatArray]:
    count = trajectory.follower_count
    header = ["t", "V"]
    columns: list[FloatArray] = [trajectory.times, trajectory.observer_lyapunov]
    if trajectory.agent_lyapunov is not None:
        header += _names("V", count, "_")
        columns.append(trajectory.agent_lyapunov)
    header += _names("etatilde_norm", count, "_") + _names("omegatilde_norm", count, "_")
    header += _names("ev_norm", count, "_")
    columns += [trajectory.eta_tilde_norm, trajectory.omega_tilde_norm, trajectory.e_v_norm]
    e_norm = trajectory.e_norm
    if e_norm is not None:
        header += _names("e_norm", count, "_")
        columns.append(e_norm)
    return header, np.column_stack(columns)


def write_csv(path: Path, header: list[str], data: FloatArray) -> None:
    np.savetxt(path, data, fmt=CSV_FORMAT, delimiter=",", header=",".join(header), comments="")


def read_csv(path: str | Path) -> tuple[list[str], FloatArray]:
    """Inverse of :func:`write_csv`; values round-trip exactly."""
    path = Path(path)
    with path.open(encoding="utf-8") as handle:
        header = handle.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def write_trajectory(trajectory: Trajectory, out_dir: str | Path) -> list[Path]:
    """Write ``leader.csv``, ``agent_<i>.csv`` and ``diagnostics.csv``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tables = [("leader.csv", leader_table(trajectory))]
    tables += [
        (f"agent_{i}.csv", agent_table(trajectory, i))
        for i in range(1, trajectory.follower_count + 1)
    ]
    tables.append(("diagnostics.csv", diagnostics_table(trajectory)))
    written = []
    for name, (header, data) in tables:
        path = out / name
        write_csv(path, header, data)
        written.append(path)
    logger.info("Wrote %d CSV files to %s", len(written), out)
    return written


def write_summary(summary: dict[str, Any], out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "summary.json"
    path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    logger.info("Wrote %s", path)
    return path
