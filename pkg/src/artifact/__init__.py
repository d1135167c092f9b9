"""Rooted double-pushout graph rewriting with relabelling."""

from .errors import (AlphabetClash, AlphabetMismatch, BadSize, DanglingViolation, GraphError,
                     HostMismatch, InvalidMatch, InvalidRule, NotFastRule, NotInImage, ParseError,
                     StepBudgetExceeded)
from .graph import (BOX, SINGLETON, TREE_ALPHABET, TRIANGLE, EdgeRec, Graph, LabelAlphabet,
                    NodeRec, degree_stats, validate_graph)
from .morphisms import Morphism, compose, find_morphisms, identity, is_isomorphic
from .rules import (DerivationStep, Rule, apply, check_dangling, invert, normalize,
                    rule_isomorphic, successors)

__all__ = [
    "AlphabetClash", "AlphabetMismatch", "BadSize", "DanglingViolation", "GraphError",
    "HostMismatch", "InvalidMatch", "InvalidRule", "NotFastRule", "NotInImage", "ParseError",
    "StepBudgetExceeded", "BOX", "SINGLETON", "TREE_ALPHABET", "TRIANGLE", "EdgeRec", "Graph",
    "LabelAlphabet", "NodeRec", "degree_stats", "validate_graph", "Morphism", "compose",
    "find_morphisms", "identity", "is_isomorphic", "DerivationStep", "Rule", "apply",
    "check_dangling", "invert", "normalize", "rule_isomorphic", "successors",
]
