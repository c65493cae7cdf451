"""Categorical diagram engine for object-oriented specifications.

The compiled core exposes parsing and serialization of .dml diagrams,
pushout computation and verification, pattern classification, the OO
construction builders, skeleton/DOT emission and the CLI entry point.
"""

from dml._core import (
    Diagram,
    classify,
    compute_pushout,
    corpus,
    emit_dot,
    emit_skeleton,
    instantiate_object,
    parse,
    paths_equal,
    polymorphism_apply,
    run_cli,
    serialize,
    template_instantiate,
    validate,
    verify_pushout,
)

__all__ = [
    "Diagram",
    "classify",
    "compute_pushout",
    "corpus",
    "emit_dot",
    "emit_skeleton",
    "instantiate_object",
    "parse",
    "paths_equal",
    "polymorphism_apply",
    "run_cli",
    "serialize",
    "template_instantiate",
    "validate",
    "verify_pushout",
]
