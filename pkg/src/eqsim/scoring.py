"""Directional similarity indices under the three comparison policies.

``fragment``
    Formulas are exploded into symbol fragments and matched like words.
    This reproduces the overestimation a fragment matcher produces on
    mathematical text.
``method1``
    Words are ignored; a formula counts as matched only if an identical
    formula exists on the other side.
``method2``
    Words and whole formulas together, one formula weighing ``w`` words.

``letters`` is a reductio kept for demonstration: plain words compared
letter by letter.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields
from typing import Sequence

from .formula import FormulaSpan, MathSymbol, SymbolKind
from .matcher import BARRIER, BOUNDARY, Granularity, MatchTile, greedy_string_tiling, tile_mixed
from .segmenter import (
    Document,
    ExclusionReason,
    ExclusionSpan,
    Segment,
    SegmentKind,
)

__all__ = [
    "Mode",
    "Policy",
    "Counts",
    "SimilarityReport",
    "index_from_counts",
    "score",
    "score_fragment",
    "score_method1",
    "score_method2",
    "letter_fragment_demo",
    "counted_formulas",
]


class Mode(str, enum.Enum):
    FRAGMENT = "fragment"
    METHOD1 = "method1"
    METHOD2 = "method2"
    LETTERS = "letters"


ALL_EXCLUSIONS = frozenset(ExclusionReason)


@dataclass(frozen=True)
class Policy:
    mode: Mode = Mode.METHOD2
    word_min_match: int = 8
    symbol_min_match: int = 1
    letter_min_match: int = 3
    formula_weight: int = 8
    alpha: bool = False
    exclude: frozenset[ExclusionReason] = ALL_EXCLUSIONS
    # when False, word runs of any length count (no short-sequence filter)
    short_sequences: bool = True
    min_formula_symbols: int = 1

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "exclude", frozenset(ExclusionReason(r) for r in self.exclude))
        for name in ("word_min_match", "symbol_min_match", "letter_min_match",
                     "formula_weight", "min_formula_symbols"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")

    @property
    def effective_word_min(self) -> int:
        return self.word_min_match if self.short_sequences else 1

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "word_min_match": self.word_min_match,
            "symbol_min_match": self.symbol_min_match,
            "letter_min_match": self.letter_min_match,
            "formula_weight": self.formula_weight,
            "alpha": self.alpha,
            "exclude": sorted(r.value for r in self.exclude),
            "short_sequences": self.short_sequences,
            "min_formula_symbols": self.min_formula_symbols,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Policy":
        d = dict(d)
        d["exclude"] = frozenset(ExclusionReason(r) for r in d.get("exclude", ()))
        return cls(**d)


@dataclass(frozen=True)
class Counts:
    """Integer tallies for one direction. Unused fields stay zero."""

    words_total: int = 0
    words_matched: int = 0
    formulas_total: int = 0
    formulas_matched: int = 0
    symbols_total: int = 0
    symbols_matched: int = 0
    letters_total: int = 0
    letters_matched: int = 0


def _fraction(counts: Counts, mode: Mode, formula_weight: int) -> tuple[int, int]:
    c = counts
    if mode is Mode.FRAGMENT:
        num, den = c.words_matched + c.symbols_matched, c.words_total + c.symbols_total
    elif mode is Mode.METHOD1:
        num, den = c.formulas_matched, c.formulas_total
    elif mode is Mode.METHOD2:
        num = c.words_matched + formula_weight * c.formulas_matched
        den = c.words_total + formula_weight * c.formulas_total
    else:
        num, den = c.letters_matched, c.letters_total
    return num, den


def index_from_counts(counts: Counts, mode: Mode, formula_weight: int = 8) -> float:
    """Percentage defined by ``mode`` over ``counts``; 0 for an empty denominator."""
    num, den = _fraction(counts, mode, formula_weight)
    if den == 0:
        return 0.0
    return 100.0 * num / den


@dataclass(frozen=True)
class SimilarityReport:
    """Result of comparing document A with document B.

    ``si_a_given_b`` is the share of A's countable units found in B.
    ``tiles`` are positions in the unit streams the policy built;
    ``highlights_a``/``highlights_b`` are the same tiles as text ranges.
    ``matched_formula_pairs`` lists every ``(i, j)`` with counted formula
    ``i`` of A equal to counted formula ``j`` of B.
    """

    mode: Mode
    si_a_given_b: float
    si_b_given_a: float
    policy: Policy
    counts_a: Counts
    counts_b: Counts
    tiles: tuple[MatchTile, ...] = ()
    matched_formula_pairs: tuple[tuple[int, int], ...] = ()
    excluded_a: tuple[ExclusionSpan, ...] = ()
    excluded_b: tuple[ExclusionSpan, ...] = ()
    highlights_a: tuple[tuple[int, int], ...] = ()
    highlights_b: tuple[tuple[int, int], ...] = ()
    flags: tuple[str, ...] = ()

    @property
    def excluded_ledger(self) -> tuple[ExclusionSpan, ...]:
        return self.excluded_a + self.excluded_b

    def recomputed(self) -> tuple[float, float]:
        w = self.policy.formula_weight
        return (
            index_from_counts(self.counts_a, self.mode, w),
            index_from_counts(self.counts_b, self.mode, w),
        )


# ---------------------------------------------------------------- unit streams


@dataclass
class _Stream:
    """Tokens fed to the matcher plus the text range of each token."""

    tokens: list = field(default_factory=list)
    spans: list = field(default_factory=list)

    def add(self, token, span):
        self.tokens.append(token)
        self.spans.append(span)

    def barrier(self, token=BARRIER):
        # excluded text is a BARRIER; a formula edge is a BOUNDARY
        if self.tokens and self.tokens[-1] is not token:
            self.add(token, None)

    def count(self, granularity: Granularity) -> int:
        return sum(1 for t in self.tokens if isinstance(t, tuple) and t[0] is granularity)


def _visible(seg: Segment, policy: Policy) -> Segment | None:
    """The segment as the policy sees it: None if it is excluded."""
    if seg.kind is not SegmentKind.EXCLUDED:
        return seg
    if seg.reason in policy.exclude:
        return None
    if seg.formula is not None:
        return Segment(SegmentKind.FORMULA, seg.start, seg.end, formula=seg.formula)
    return Segment(SegmentKind.WORDS, seg.start, seg.end, words=seg.words)


def _counts_formula(f: FormulaSpan, policy: Policy) -> bool:
    return len(f.canonical) >= policy.min_formula_symbols


def counted_formulas(doc: Document, policy: Policy) -> list[FormulaSpan]:
    """Formulas of ``doc`` that enter the formula counts under ``policy``."""
    out = []
    for seg in doc.segments:
        seg = _visible(seg, policy)
        if seg is not None and seg.kind is SegmentKind.FORMULA and _counts_formula(seg.formula, policy):
            out.append(seg.formula)
    return out


def _symbols(f: FormulaSpan, policy: Policy) -> list[MathSymbol]:
    if policy.alpha:
        return [s for s in f.alpha_canonical if s.kind is not SymbolKind.STRUCTURAL]
    return list(f.fragments)


def _build_stream(doc: Document, policy: Policy, explode_formulas: bool) -> _Stream:
    st = _Stream()
    for seg in doc.segments:
        vis = _visible(seg, policy)
        if vis is None:
            st.barrier()
            continue
        if vis.kind is SegmentKind.WORDS:
            for w in vis.words:
                st.add((Granularity.WORD, w.normalized), (w.start, w.end))
        elif explode_formulas and _counts_formula(vis.formula, policy):
            f = vis.formula
            for s in _symbols(f, policy):
                st.add((Granularity.SYMBOL, s.text), (f.start + s.pos, f.start + s.pos + s.length))
        else:
            st.barrier(BOUNDARY)
    return st


def _highlights(tiles: Sequence[MatchTile], spans: list, side: str) -> tuple[tuple[int, int], ...]:
    ranges = []
    for t in tiles:
        start = t.a_start if side == "a" else t.b_start
        for k in range(start, start + t.a_len):
            ranges.append(spans[k])
    ranges.sort()
    merged: list[list[int]] = []
    for s, e in ranges:
        if merged and s <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    return tuple((s, e) for s, e in merged)


def _ledger(doc: Document, policy: Policy, formulas_only: bool = False) -> tuple[ExclusionSpan, ...]:
    out = []
    for seg in doc.segments:
        if seg.kind is SegmentKind.EXCLUDED and seg.reason in policy.exclude:
            if formulas_only and seg.formula is None:
                continue
            out.append(ExclusionSpan(seg.start, seg.end, seg.reason))
    return tuple(out)


def _sorted_tiles(tiles: Sequence[MatchTile]) -> tuple[MatchTile, ...]:
    return tuple(sorted(tiles, key=lambda t: (t.a_start, t.b_start)))


def _word_tiles(sa: _Stream, sb: _Stream, policy: Policy) -> list[MatchTile]:
    mins = {
        Granularity.WORD: policy.effective_word_min,
        Granularity.SYMBOL: policy.symbol_min_match,
        Granularity.LETTER: policy.letter_min_match,
    }
    return tile_mixed(sa.tokens, sb.tokens, mins)


def _report(mode, policy, ca, cb, **kw) -> SimilarityReport:
    w = policy.formula_weight
    flags = [
        f"zero_denominator_{side}"
        for side, c in (("a", ca), ("b", cb))
        if _fraction(c, mode, w)[1] == 0
    ]
    return SimilarityReport(
        mode=mode,
        si_a_given_b=index_from_counts(ca, mode, w),
        si_b_given_a=index_from_counts(cb, mode, w),
        policy=policy,
        counts_a=ca,
        counts_b=cb,
        flags=tuple(flags),
        **kw,
    )


def _check_mode(policy: Policy, mode: Mode):
    if policy.mode is not mode:
        raise ValueError(f"policy mode is {policy.mode.value}, expected {mode.value}")


# ---------------------------------------------------------------- modes


def score_fragment(doc_a: Document, doc_b: Document, policy: Policy) -> SimilarityReport:
    """Words and formula fragments in one interleaved stream per document."""
    _check_mode(policy, Mode.FRAGMENT)
    sa = _build_stream(doc_a, policy, explode_formulas=True)
    sb = _build_stream(doc_b, policy, explode_formulas=True)
    tiles = _sorted_tiles(_word_tiles(sa, sb, policy))

    def tally(stream, side):
        matched = {Granularity.WORD: 0, Granularity.SYMBOL: 0}
        for t in tiles:
            matched[t.granularity] += t.a_len
        return Counts(
            words_total=stream.count(Granularity.WORD),
            words_matched=matched[Granularity.WORD],
            formulas_total=len(counted_formulas(doc_a if side == "a" else doc_b, policy)),
            symbols_total=stream.count(Granularity.SYMBOL),
            symbols_matched=matched[Granularity.SYMBOL],
        )

    return _report(
        Mode.FRAGMENT, policy, tally(sa, "a"), tally(sb, "b"),
        tiles=tiles,
        excluded_a=_ledger(doc_a, policy),
        excluded_b=_ledger(doc_b, policy),
        highlights_a=_highlights(tiles, sa.spans, "a"),
        highlights_b=_highlights(tiles, sb.spans, "b"),
    )


def _formula_pairs(fa: list[FormulaSpan], fb: list[FormulaSpan], alpha: bool) -> tuple[tuple[int, int], ...]:
    index: dict = {}
    for j, f in enumerate(fb):
        index.setdefault(f.alpha_key if alpha else f.key, []).append(j)
    pairs = []
    for i, f in enumerate(fa):
        for j in index.get(f.alpha_key if alpha else f.key, ()):
            pairs.append((i, j))
    return tuple(pairs)


def score_method1(doc_a: Document, doc_b: Document, policy: Policy) -> SimilarityReport:
    """Formulas only, each compared as a whole.

    An A formula is matched if any B formula is identical to it (presence,
    not multiplicity). A side without formulas scores 0 and is flagged.
    """
    _check_mode(policy, Mode.METHOD1)
    fa, fb = counted_formulas(doc_a, policy), counted_formulas(doc_b, policy)
    pairs = _formula_pairs(fa, fb, policy.alpha)
    ca = Counts(formulas_total=len(fa), formulas_matched=len({i for i, _ in pairs}))
    cb = Counts(formulas_total=len(fb), formulas_matched=len({j for _, j in pairs}))
    return _report(
        Mode.METHOD1, policy, ca, cb,
        matched_formula_pairs=pairs,
        excluded_a=_ledger(doc_a, policy, formulas_only=True),
        excluded_b=_ledger(doc_b, policy, formulas_only=True),
    )


def score_method2(doc_a: Document, doc_b: Document, policy: Policy) -> SimilarityReport:
    """Words tiled as in fragment mode, formulas matched whole, one formula = w words."""
    _check_mode(policy, Mode.METHOD2)
    sa = _build_stream(doc_a, policy, explode_formulas=False)
    sb = _build_stream(doc_b, policy, explode_formulas=False)
    tiles = _sorted_tiles(_word_tiles(sa, sb, policy))
    fa, fb = counted_formulas(doc_a, policy), counted_formulas(doc_b, policy)
    pairs = _formula_pairs(fa, fb, policy.alpha)
    covered = sum(t.a_len for t in tiles)
    ca = Counts(
        words_total=sa.count(Granularity.WORD), words_matched=covered,
        formulas_total=len(fa), formulas_matched=len({i for i, _ in pairs}),
    )
    cb = Counts(
        words_total=sb.count(Granularity.WORD), words_matched=covered,
        formulas_total=len(fb), formulas_matched=len({j for _, j in pairs}),
    )
    return _report(
        Mode.METHOD2, policy, ca, cb,
        tiles=tiles,
        matched_formula_pairs=pairs,
        excluded_a=_ledger(doc_a, policy),
        excluded_b=_ledger(doc_b, policy),
        highlights_a=_highlights(tiles, sa.spans, "a"),
        highlights_b=_highlights(tiles, sb.spans, "b"),
    )


def _letters(chars: str, offset: int = 0) -> tuple[list[str], list[tuple[int, int]]]:
    toks, spans = [], []
    for k, ch in enumerate(chars):
        if not ch.isspace():
            toks.append(ch.lower())
            spans.append((offset + k, offset + k + 1))
    return toks, spans


def _letter_report(ta, sa, tb, sb, policy) -> SimilarityReport:
    tiles = _sorted_tiles(
        greedy_string_tiling(ta, tb, policy.letter_min_match, Granularity.LETTER)
    )
    covered = sum(t.a_len for t in tiles)
    na = sum(1 for t in ta if t is not BARRIER)
    nb = sum(1 for t in tb if t is not BARRIER)
    return _report(
        Mode.LETTERS, policy,
        Counts(letters_total=na, letters_matched=covered),
        Counts(letters_total=nb, letters_matched=covered),
        tiles=tiles,
        highlights_a=_highlights(tiles, sa, "a"),
        highlights_b=_highlights(tiles, sb, "b"),
    )


def letter_fragment_demo(phrase_a: str, phrase_b: str, min_match: int = 3) -> SimilarityReport:
    """Compare two phrases letter by letter, spaces removed.

    Deliberately absurd: it treats words the way a fragment matcher treats
    formulas.

    >>> r = letter_fragment_demo("The solute was in a container",
    ...                          "The exact solution was obtained")
    >>> r.counts_a.letters_matched, r.counts_a.letters_total
    (16, 24)
    """
    policy = Policy(mode=Mode.LETTERS, letter_min_match=min_match)
    ta, sa = _letters(phrase_a)
    tb, sb = _letters(phrase_b)
    return _letter_report(ta, sa, tb, sb, policy)


def _score_letters(doc_a: Document, doc_b: Document, policy: Policy) -> SimilarityReport:
    def stream(doc):
        toks, spans = [], []
        for seg in doc.segments:
            vis = _visible(seg, policy)
            if vis is None:
                # excluded text must not let its neighbours run together
                if toks and toks[-1] is not BARRIER:
                    toks.append(BARRIER)
                    spans.append(None)
            elif vis.kind is SegmentKind.WORDS:
                for w in vis.words:
                    t, s = _letters(doc.raw_text[w.start : w.end].lower(), w.start)
                    toks += t
                    spans += s
        return toks, spans

    ta, sa = stream(doc_a)
    tb, sb = stream(doc_b)
    return _letter_report(ta, sa, tb, sb, policy)


def score(doc_a: Document, doc_b: Document, policy: Policy) -> SimilarityReport:
    """Dispatch on ``policy.mode``."""
    if policy.mode is Mode.FRAGMENT:
        return score_fragment(doc_a, doc_b, policy)
    if policy.mode is Mode.METHOD1:
        return score_method1(doc_a, doc_b, policy)
    if policy.mode is Mode.METHOD2:
        return score_method2(doc_a, doc_b, policy)
    return _score_letters(doc_a, doc_b, policy)


def report_fields() -> list[str]:
    return [f.name for f in fields(SimilarityReport)]
