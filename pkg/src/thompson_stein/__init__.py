"""Thompson-Stein groups F(n_1, ..., n_k): diagrams, normal forms and word metric."""

from .diagrams import (
    IDENTITY,
    NotInGroup,
    PLMap,
    TreePair,
    cancel_exposed_pairs,
    compose,
    format_diagram,
    format_map,
    from_map,
    invert,
    parse_diagram,
    parse_map,
    to_map,
)
from .metric import MetricConstants, ball, bfs_length, constants, growth_experiment, lower_bound, to_finite_word
from .minimizer import CanonicalElement, canonical_from_map, canonicalize, minimal_diagrams
from .rationals import format_rational, parse_rational, slope_decompose
from .signature import DivisibilityError, GroupSignature, SignatureError
from .trees import LEAF, Caret, format_tree, parse_tree, trees_equivalent
from .words import (
    Generator,
    NormalForm,
    Word,
    evaluate,
    normal_form,
    parse_word,
    print_word,
    relators,
    word_map,
)

__all__ = [
    "ball",
    "bfs_length",
    "cancel_exposed_pairs",
    "canonical_from_map",
    "CanonicalElement",
    "canonicalize",
    "Caret",
    "compose",
    "constants",
    "DivisibilityError",
    "evaluate",
    "format_diagram",
    "format_map",
    "format_rational",
    "format_tree",
    "from_map",
    "Generator",
    "GroupSignature",
    "growth_experiment",
    "IDENTITY",
    "invert",
    "LEAF",
    "lower_bound",
    "MetricConstants",
    "minimal_diagrams",
    "normal_form",
    "NormalForm",
    "NotInGroup",
    "parse_diagram",
    "parse_map",
    "parse_rational",
    "parse_tree",
    "parse_word",
    "PLMap",
    "print_word",
    "relators",
    "SignatureError",
    "slope_decompose",
    "to_finite_word",
    "to_map",
    "TreePair",
    "trees_equivalent",
    "Word",
    "word_map",
]
