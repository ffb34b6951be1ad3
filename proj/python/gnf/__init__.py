"""Verifiable recursion over a hereditarily finite list universe."""

from ._core import (
    System,
    audit_json,
    check,
    element_rank,
    element_size,
    enumerate_universe,
    evaluate,
    load_system,
    parse_system,
)

__all__ = [
    "System",
    "audit_json",
    "check",
    "element_rank",
    "element_size",
    "enumerate_universe",
    "evaluate",
    "load_system",
    "parse_system",
]
