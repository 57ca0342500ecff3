"""Utility modules for Adaptive Consensus."""

from .safe_yaml import (
    YAMLSizeExceededError,
    YAMLStructureError,
    read_text_limited,
    safe_yaml_load,
)

__all__ = [
    "read_text_limited",
    "safe_yaml_load",
    "YAMLSizeExceededError",
    "YAMLStructureError",
]
