"""Affine tangle words, crossingless matchings and annular arc algebras."""

from .algebra import compose, degree, hom_space, identity
from .matchings import enumerate_matchings, evaluate_word, from_signs, to_signs
from .rewrite import applicable_rewrites, check_relation, eliminate_crossings
from .tangle import dual, format_word, parse_word

__all__ = [
    "applicable_rewrites",
    "check_relation",
    "compose",
    "degree",
    "dual",
    "eliminate_crossings",
    "enumerate_matchings",
    "evaluate_word",
    "format_word",
    "from_signs",
    "hom_space",
    "identity",
    "parse_word",
    "to_signs",
]
