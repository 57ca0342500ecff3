"""
Scenario Configuration

Loads scenario files (YAML, JSON or TOML) into a validated
:class:`~adaptive_consensus.simulation.scenario.Scenario` and writes the
canonical YAML form back out.

Schema (dotted keys)::

    seed                       integer in [0, 2**64)                (default 42)
    mode                       closed_loop | observer_only          (default closed_loop)
    graph.node_count           integer                              (default len(agents) + 1)
    graph.edges                list of [from, to] or [from, to, weight]
    leader.omega               list of l positive frequencies
    leader.v0                  list of 2l numbers
    leader.C                   n x 2l matrix
    gains.mu1, gains.mu2       positive numbers
    gains.alpha                positive number
    gains.K                    number (k*I) or n x n matrix
    gains.Lambda               number (lambda*I), diagonal list or matrix
    integration.h              step (s)                             (default 1e-3)
    integration.T              horizon (s)                          (default 30)
    integration.record_every   stride                               (default 10)
    agents[i].theta            5 arm parameters
    agents[i].gravity          (default 9.8)
    agents[i].q0, qdot0        (default 0)
    agents[i].theta_hat0       (default 0)
    agents[i].omega_hat0       list of l numbers, or
    agents[i].omega_hat0_random  [low, high]
    agents[i].eta0             (default 0)

Every error names the dotted key and, for YAML/JSON sources, its line.
Unknown keys are rejected.
"""

from __future__ import annotations

import logging
import sys
from collections.abc import Iterator, Mapping
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from ..control.controller import ControllerGains
from ..errors import ErrorCode
from ..exceptions import ConfigError, ConsensusError
from ..models.leader import LeaderModel
from ..models.plant import ARM_DOF, ARM_PARAM_DIM, STANDARD_GRAVITY, ArmParams, PlantState
from ..network.topology import build_digraph
from ..simulation.scenario import (
    AgentSpec,
    IntegrationSettings,
    RandomUniform,
    Scenario,
    ScenarioMode,
)
from ..utils.safe_yaml import (
    YAMLSizeExceededError,
    YAMLStructureError,
    read_text_limited,
    safe_yaml_load,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = frozenset({"seed", "mode", "graph", "leader", "gains", "integration", "agents"})
GRAPH_KEYS = frozenset({"node_count", "edges"})
LEADER_KEYS = frozenset({"omega", "v0", "C"})
GAIN_KEYS = frozenset({"mu1", "mu2", "alpha", "K", "Lambda"})
INTEGRATION_KEYS = frozenset({"h", "T", "record_every"})
AGENT_KEYS = frozenset(
    {"theta", "gravity", "q0", "qdot0", "theta_hat0", "omega_hat0", "omega_hat0_random", "eta0"}
)

DEFAULT_SEED = 42


class _Reader:
    """Typed access to a parsed document with key/line-aware errors."""

    def __init__(self, lines: Mapping[str, int] | None, source: str) -> None:
        self.lines = dict(lines or {})
        self.source = source

    def line_of(self, key: str) -> int | None:
        while key:
            if key in self.lines:
                return self.lines[key]
            cut = max(key.rfind("."), key.rfind("["))
            key = key[:cut] if cut > 0 else ""
        return None

    def error(
        self,
        key: str,
        message: str,
        code: ErrorCode = ErrorCode.INVALID_VALUE,
        suggestion: str | None = None,
    ) -> ConfigError:
        line = self.line_of(key)
        where = f"{self.source}:{line}" if line is not None else self.source
        location: dict[str, Any] = {"key": key}
        if line is not None:
            location["line"] = line
        return ConfigError(
            f"{where}: {key}: {message}", code=code, location=location, suggestion=suggestion
        )

    def mapping(self, value: Any, key: str, allowed: frozenset[str]) -> dict[str, Any]:
        if not isinstance(value, Mapping):
            raise self.error(key or "<root>", f"expected a table, got {type(value).__name__}")
        for name in value:
            if name not in allowed:
                path = f"{key}.{name}" if key else str(name)
                raise self.error(
                    path,
                    "unknown key",
                    code=ErrorCode.UNKNOWN_KEY,
                    suggestion=f"Allowed keys: {', '.join(sorted(allowed))}",
                )
        return dict(value)

    def require(self, table: Mapping[str, Any], name: str, key: str) -> Any:
        if name not in table:
            path = f"{key}.{name}" if key else name
            raise self.error(path, "missing required key", code=ErrorCode.MISSING_REQUIRED_FIELD)
        return table[name]

    def number(self, value: Any, key: str) -> float:
        # PyYAML reads exponents without a dot ("1e-3") as strings.
        if isinstance(value, bool):
            raise self.error(key, f"expected a number, got {value!r}")
        if isinstance(value, str):
            try:
                value = float(value)
            except ValueError:
                raise self.error(key, f"expected a number, got {value!r}") from None
        if not isinstance(value, (int, float)) or not np.isfinite(value):
            raise self.error(key, f"expected a finite number, got {value!r}")
        return float(value)

    def integer(self, value: Any, key: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.error(key, f"expected an integer, got {value!r}")
        return value

    def vector(self, value: Any, key: str, size: int | None = None) -> np.ndarray:
        if not isinstance(value, list):
            raise self.error(key, f"expected a list of numbers, got {type(value).__name__}")
        out = np.array([self.number(item, f"{key}[{i}]") for i, item in enumerate(value)])
        if size is not None and out.size != size:
            raise self.error(
                key, f"expected {size} entries, got {out.size}", code=ErrorCode.DIMENSION_MISMATCH
            )
        return out

    def matrix(self, value: Any, key: str) -> np.ndarray:
        if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
            raise self.error(key, "expected a nonempty list of rows")
        rows = [self.vector(row, f"{key}[{i}]") for i, row in enumerate(value)]
        if len({row.size for row in rows}) != 1:
            raise self.error(key, "rows have different lengths", code=ErrorCode.DIMENSION_MISMATCH)
        return np.stack(rows)

    def scalar_or_array(self, value: Any, key: str) -> float | np.ndarray:
        if isinstance(value, list):
            if value and all(isinstance(row, list) for row in value):
                return self.matrix(value, key)
            return self.vector(value, key)
        return self.number(value, key)

    @contextmanager
    def domain(self, key: str) -> Iterator[None]:
        """Re-raise model and graph errors as config errors located at *key*."""
        try:
            yield
        except ConfigError:
            raise
        except ConsensusError as exc:
            field = exc.location.get("field")
            path = key
            if isinstance(field, str):
                path = f"{key}.{field}" if key else field
            raise self.error(
                path, exc.message, code=exc.error_code, suggestion=exc.suggestion
            ) from exc


def _parse_agent(reader: _Reader, raw: Any, key: str) -> AgentSpec:
    table = reader.mapping(raw, key, AGENT_KEYS)
    theta = reader.vector(reader.require(table, "theta", key), f"{key}.theta", ARM_PARAM_DIM)
    gravity = reader.number(table.get("gravity", STANDARD_GRAVITY), f"{key}.gravity")
    q0 = reader.vector(table.get("q0", [0.0] * ARM_DOF), f"{key}.q0", ARM_DOF)
    qdot0 = reader.vector(table.get("qdot0", [0.0] * ARM_DOF), f"{key}.qdot0", ARM_DOF)
    theta_hat0 = reader.vector(
        table.get("theta_hat0", [0.0] * ARM_PARAM_DIM), f"{key}.theta_hat0", ARM_PARAM_DIM
    )
    explicit, random = "omega_hat0" in table, "omega_hat0_random" in table
    if explicit == random:
        raise reader.error(
            f"{key}.omega_hat0",
            "exactly one of omega_hat0 and omega_hat0_random is required",
            code=ErrorCode.MISSING_REQUIRED_FIELD,
        )
    omega_hat0: np.ndarray | RandomUniform
    if explicit:
        omega_hat0 = reader.vector(table["omega_hat0"], f"{key}.omega_hat0")
    else:
        bounds = reader.vector(table["omega_hat0_random"], f"{key}.omega_hat0_random", 2)
        with reader.domain(key):
            omega_hat0 = RandomUniform(float(bounds[0]), float(bounds[1]))
    eta0 = reader.vector(table["eta0"], f"{key}.eta0") if "eta0" in table else None
    with reader.domain(key):
        return AgentSpec(
            params=ArmParams(theta=theta, gravity=gravity),
            omega_hat0=omega_hat0,
            state0=PlantState(q0, qdot0),
            theta_hat0=theta_hat0,
            eta0=eta0,
        )


def parse_scenario(
    data: Any, lines: Mapping[str, int] | None = None, source: str = "<config>"
) -> Scenario:
    """Validate a parsed document and build the scenario.

    Args:
        data: Parsed document (nested dicts and lists).
        lines: Dotted key -> 1-based line, used in error messages.
        source: File name used in error messages.

    Raises:
        ConfigError: On any schema or model violation; the message names
            the key and, when known, its line.
    """
    reader = _Reader(lines, source)
    root = reader.mapping(data, "", TOP_LEVEL_KEYS)

    raw_agents = reader.require(root, "agents", "")
    if not isinstance(raw_agents, list) or not raw_agents:
        raise reader.error("agents", "expected a nonempty list of agents")
    agents = tuple(_parse_agent(reader, raw, f"agents[{i}]") for i, raw in enumerate(raw_agents))

    graph_table = reader.mapping(reader.require(root, "graph", ""), "graph", GRAPH_KEYS)
    node_count = reader.integer(graph_table.get("node_count", len(agents) + 1), "graph.node_count")
    raw_edges = reader.require(graph_table, "edges", "graph")
    if not isinstance(raw_edges, list):
        raise reader.error("graph.edges", "expected a list of [from, to, weight] edges")
    edges = []
    for i, raw in enumerate(raw_edges):
        key = f"graph.edges[{i}]"
        if not isinstance(raw, list) or len(raw) not in (2, 3):
            raise reader.error(key, "edge must be [from, to] or [from, to, weight]")
        source_node = reader.integer(raw[0], f"{key}[0]")
        target_node = reader.integer(raw[1], f"{key}[1]")
        weight = reader.number(raw[2], f"{key}[2]") if len(raw) == 3 else 1.0
        edges.append((source_node, target_node, weight))
    with reader.domain("graph.edges"):
        graph = build_digraph(node_count, edges)

    leader_table = reader.mapping(reader.require(root, "leader", ""), "leader", LEADER_KEYS)
    with reader.domain("leader"):
        leader = LeaderModel(
            omega=reader.vector(reader.require(leader_table, "omega", "leader"), "leader.omega"),
            v0=reader.vector(reader.require(leader_table, "v0", "leader"), "leader.v0"),
            c_out=reader.matrix(reader.require(leader_table, "C", "leader"), "leader.C"),
        )

    gains_table = reader.mapping(reader.require(root, "gains", ""), "gains", GAIN_KEYS)
    gain_values = {
        name: reader.require(gains_table, name, "gains")
        for name in ("mu1", "mu2", "alpha", "K", "Lambda")
    }
    with reader.domain("gains"):
        gains = ControllerGains.build(
            alpha=reader.number(gain_values["alpha"], "gains.alpha"),
            k_gain=reader.scalar_or_array(gain_values["K"], "gains.K"),
            lambda_gain=reader.scalar_or_array(gain_values["Lambda"], "gains.Lambda"),
            mu1=reader.number(gain_values["mu1"], "gains.mu1"),
            mu2=reader.number(gain_values["mu2"], "gains.mu2"),
            dof=ARM_DOF,
            param_dim=ARM_PARAM_DIM,
        )

    integration_table = reader.mapping(
        root.get("integration", {}), "integration", INTEGRATION_KEYS
    )
    with reader.domain("integration"):
        integration = IntegrationSettings(
            h=reader.number(integration_table.get("h", 1e-3), "integration.h"),
            T=reader.number(integration_table.get("T", 30.0), "integration.T"),
            record_every=reader.integer(
                integration_table.get("record_every", 10), "integration.record_every"
            ),
        )

    seed = reader.integer(root.get("seed", DEFAULT_SEED), "seed")
    mode_value = root.get("mode", ScenarioMode.CLOSED_LOOP.value)
    try:
        mode = ScenarioMode(mode_value)
    except ValueError:
        raise reader.error(
            "mode",
            f"expected one of {[m.value for m in ScenarioMode]}, got {mode_value!r}",
        ) from None

    with reader.domain(""):
        scenario = Scenario(
            graph=graph,
            leader=leader,
            agents=agents,
            gains=gains,
            integration=integration,
            seed=seed,
            mode=mode,
        )
    logger.debug("Parsed scenario from %s: %d followers", source, scenario.follower_count)
    return scenario


def _parse_error_line(exc: Exception) -> int | None:
    mark = getattr(exc, "problem_mark", None)
    if mark is not None:
        return int(mark.line) + 1
    lineno = getattr(exc, "lineno", None)
    return int(lineno) if lineno is not None else None


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a scenario file.

    ``.toml`` files are read with tomllib; everything else is parsed as YAML
    (JSON included).

    Raises:
        ConfigError: If the file is missing, unparsable or invalid.
    """
    path = Path(path)
    try:
        if path.suffix.lower() == ".toml":
            data, lines = tomllib.loads(read_text_limited(path)), None
        else:
            data, lines = safe_yaml_load(path)
    except FileNotFoundError:
        raise ConfigError(
            f"Configuration file not found: {path}",
            code=ErrorCode.CONFIG_NOT_FOUND,
            location={"path": str(path)},
        ) from None
    except (
        yaml.YAMLError,
        tomllib.TOMLDecodeError,
        YAMLSizeExceededError,
        YAMLStructureError,
        ValueError,
    ) as exc:
        line = _parse_error_line(exc)
        location: dict[str, Any] = {"path": str(path)}
        if line is not None:
            location["line"] = line
        where = f"{path}:{line}" if line is not None else str(path)
        raise ConfigError(
            f"{where}: cannot parse configuration: {exc}",
            code=ErrorCode.CONFIG_PARSE_FAILED,
            location=location,
        ) from exc
    logger.info("Loaded scenario file %s", path)
    return parse_scenario(data, lines, source=str(path))


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    """Canonical document with every field explicit."""
    agents = []
    for agent in scenario.agents:
        entry: dict[str, Any] = {
            "theta": agent.params.theta.tolist(),
            "gravity": agent.params.gravity,
            "q0": agent.state0.q.tolist(),
            "qdot0": agent.state0.q_dot.tolist(),
            "theta_hat0": agent.theta_hat0.tolist(),
        }
        if isinstance(agent.omega_hat0, RandomUniform):
            entry["omega_hat0_random"] = [agent.omega_hat0.low, agent.omega_hat0.high]
        else:
            entry["omega_hat0"] = agent.omega_hat0.tolist()
        entry["eta0"] = (
            np.zeros(scenario.leader.m) if agent.eta0 is None else agent.eta0
        ).tolist()
        agents.append(entry)
    return {
        "seed": int(scenario.seed),
        "mode": scenario.mode.value,
        "graph": {
            "node_count": scenario.graph.node_count,
            "edges": [edge.as_list() for edge in scenario.graph.edges],
        },
        "leader": scenario.leader.to_dict(),
        "gains": scenario.gains.to_dict(),
        "integration": {
            "h": scenario.integration.h,
            "T": scenario.integration.T,
            "record_every": int(scenario.integration.record_every),
        },
        "agents": agents,
    }


def dump_scenario(scenario: Scenario) -> str:
    """Canonical YAML; dumping a re-parsed dump reproduces it byte for byte."""
    return yaml.safe_dump(
        scenario_to_dict(scenario), sort_keys=False, default_flow_style=None, width=100
    )
