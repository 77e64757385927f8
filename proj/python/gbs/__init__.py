"""Generalised Baire space workbench: ordinals, pattern-map points, Borel codes and reductions."""

from ._core import (
    DomainError,
    GbsError,
    Ordinal,
    ParseError,
    Point,
    Relation,
    SpaceMismatch,
    Spec,
    approx_lemma_check,
    decide,
    game_member,
    jump_tower,
    parse_ordinal,
    parse_point,
    parse_relation,
    parse_spec,
    red_E0_to_E1,
    red_E0_to_idplus,
    red_E1_to_E0,
    run_command,
    verify_reduction,
)

__all__ = [
    "DomainError",
    "GbsError",
    "Ordinal",
    "ParseError",
    "Point",
    "Relation",
    "SpaceMismatch",
    "Spec",
    "approx_lemma_check",
    "decide",
    "game_member",
    "jump_tower",
    "parse_ordinal",
    "parse_point",
    "parse_relation",
    "parse_spec",
    "red_E0_to_E1",
    "red_E0_to_idplus",
    "red_E1_to_E0",
    "run_command",
    "verify_reduction",
]
