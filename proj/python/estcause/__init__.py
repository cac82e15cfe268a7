"""Causality analysis of instantaneous Esterel programs."""

from ._core import (
    ParseError,
    ResourceLimit,
    SemanticError,
    analyze,
    ground,
    pretty,
    report_text,
    subterms,
)

__all__ = [
    "ParseError",
    "ResourceLimit",
    "SemanticError",
    "analyze",
    "ground",
    "pretty",
    "report_text",
    "subterms",
]
