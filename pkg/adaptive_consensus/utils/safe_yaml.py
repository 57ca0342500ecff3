"""Size- and shape-limited, symlink-refusing loading of scenario files.

``safe_yaml_load`` checks the file size before anything is parsed, then
composes the PyYAML node tree and bounds its nesting depth and node count
before the data is constructed.  It returns the data together with the
1-based line of every key, so configuration errors can point into the file.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any

import yaml

DEFAULT_MAX_BYTES: int = 1 * 1024 * 1024  # 1 MB

# A scenario nests at most five levels (agents[i].theta[k]); leave headroom.
DEFAULT_MAX_DEPTH: int = 32

# Visits, counting every reuse of an anchored node.
DEFAULT_MAX_NODES: int = 200_000


class YAMLSizeExceededError(Exception):
    """Raised when a configuration file exceeds the allowed size limit."""

    def __init__(self, path: Path, size: int, max_size: int) -> None:
        self.path = path
        self.size = size
        self.max_size = max_size
        super().__init__(
            f"Configuration file exceeds size limit: {path} is {size:,} bytes "
            f"(limit: {max_size:,} bytes)"
        )


class YAMLStructureError(Exception):
    """Raised when a document nests too deeply or expands to too many nodes."""

    def __init__(self, path: Path, reason: str, line: int | None = None) -> None:
        self.path = path
        self.reason = reason
        self.lineno = line
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"Configuration document too complex at {where}: {reason}")


def read_text_limited(path: str | Path, max_size: int = DEFAULT_MAX_BYTES) -> str:
    """Read a UTF-8 text file, refusing symlinks and files over *max_size*.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If the path is a symlink.
        YAMLSizeExceededError: If the file exceeds *max_size*.
    """
    path = Path(path)

    # O_NOFOLLOW rejects symlinks atomically; fall back to is_symlink() elsewhere.
    o_nofollow = getattr(os, "O_NOFOLLOW", 0)
    if o_nofollow:
        try:
            fd = os.open(str(path), os.O_RDONLY | o_nofollow)
        except FileNotFoundError:
            raise
        except OSError as e:
            if e.errno in (40, 62):  # ELOOP on Linux / macOS
                raise ValueError(f"Refusing to follow symlink: {path}") from e
            raise
        try:
            f = os.fdopen(fd, encoding="utf-8")
        except Exception:
            os.close(fd)
            raise
    else:
        if path.is_symlink():
            raise ValueError(f"Refusing to follow symlink: {path}")
        f = open(path, encoding="utf-8")
    with f:
        file_size = os.fstat(f.fileno()).st_size
        if file_size > max_size:
            raise YAMLSizeExceededError(path, file_size, max_size)
        return f.read()


def check_node_limits(
    root: yaml.Node | None, path: Path, max_depth: int, max_nodes: int
) -> None:
    """Walk the composed tree and reject it past *max_depth* or *max_nodes*.

    Raises:
        YAMLStructureError: Naming the line where a limit was crossed.
    """
    if root is None:
        return
    stack: list[tuple[yaml.Node, int]] = [(root, 1)]
    visited = 0
    while stack:
        node, depth = stack.pop()
        visited += 1
        line = node.start_mark.line + 1
        if depth > max_depth:
            raise YAMLStructureError(path, f"nesting deeper than {max_depth}", line)
        if visited > max_nodes:
            raise YAMLStructureError(path, f"more than {max_nodes:,} nodes", line)
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                stack.append((key_node, depth + 1))
                stack.append((value_node, depth + 1))
        elif isinstance(node, yaml.SequenceNode):
            stack.extend((item, depth + 1) for item in node.value)


def key_lines(node: yaml.Node | None, prefix: str = "") -> dict[str, int]:
    """Map dotted key paths (``gains.alpha``, ``agents[2].theta``) to 1-based lines."""
    lines: dict[str, int] = {}
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            path = f"{prefix}.{key_node.value}" if prefix else str(key_node.value)
            lines[path] = key_node.start_mark.line + 1
            lines.update(key_lines(value_node, path))
    elif isinstance(node, yaml.SequenceNode):
        for index, item in enumerate(node.value):
            path = f"{prefix}[{index}]"
            lines[path] = item.start_mark.line + 1
            lines.update(key_lines(item, path))
    return lines


def safe_yaml_load(
    path: str | Path,
    max_size: int = DEFAULT_MAX_BYTES,
    *,
    max_depth: int = DEFAULT_MAX_DEPTH,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> tuple[Any, dict[str, int]]:
    """Load a YAML (or JSON) scenario file and map its keys to lines.

    Returns:
        Tuple of (data, key_lines).

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If the path is a symlink.
        YAMLSizeExceededError: If the file exceeds *max_size*.
        YAMLStructureError: If the node tree exceeds *max_depth* or *max_nodes*.
        yaml.YAMLError: If the file is not valid YAML.
    """
    path = Path(path)
    text = read_text_limited(path, max_size)
    root = yaml.compose(text, Loader=yaml.SafeLoader)
    check_node_limits(root, path, max_depth, max_nodes)
    return yaml.safe_load(text), key_lines(root)
