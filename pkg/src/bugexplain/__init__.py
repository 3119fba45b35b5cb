"""Learning small automata that explain the failures of a system under test."""
from .automata import Dfa, Label, ThreeDfa, word
from .extract import extract_explanation
from .lstar import EquivalenceConfig, Teacher, learn
from .relabel import ExplanationKind, ed_relabel, efe_relabel

__all__ = [
    "Dfa", "ThreeDfa", "Label", "word", "ExplanationKind", "EquivalenceConfig",
    "Teacher", "learn", "efe_relabel", "ed_relabel", "extract_explanation",
]
