"""Similarity indices for scientific texts with equations and formulas."""

from .formula import FormulaSpan, MathSymbol, SymbolKind, formulas_equal, tokenize_formula
from .matcher import Granularity, MatchTile, coverage, greedy_string_tiling
from .report import Format, render, report_from_dict, report_to_dict
from .scoring import (
    Counts,
    Mode,
    Policy,
    SimilarityReport,
    letter_fragment_demo,
    score,
    score_fragment,
    score_method1,
    score_method2,
)
from .segmenter import (
    Document,
    ExclusionReason,
    ParseOptions,
    apply_phrase_exclusions,
    parse_document,
    tokenize_words,
)

__all__ = [
    "FormulaSpan",
    "MathSymbol",
    "SymbolKind",
    "formulas_equal",
    "tokenize_formula",
    "Granularity",
    "MatchTile",
    "coverage",
    "greedy_string_tiling",
    "Format",
    "render",
    "report_from_dict",
    "report_to_dict",
    "Counts",
    "Mode",
    "Policy",
    "SimilarityReport",
    "letter_fragment_demo",
    "score",
    "score_fragment",
    "score_method1",
    "score_method2",
    "Document",
    "ExclusionReason",
    "ParseOptions",
    "apply_phrase_exclusions",
    "parse_document",
    "tokenize_words",
]

__version__ = "0.1.0"
