"""Split document text into words, formulas and excluded spans.

Offsets everywhere are indices into the Python ``str`` holding the document
(code points, not UTF-8 bytes).
"""

from __future__ import annotations

import enum
import re
import unicodedata
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .formula import EmptyFormula, FormulaSpan, alpha_canonicalize_document, make_formula

__all__ = [
    "ParseError",
    "UnbalancedDelimiter",
    "InvalidEncoding",
    "EmptyFormula",
    "SegmentKind",
    "ExclusionReason",
    "WordToken",
    "ExclusionSpan",
    "Segment",
    "Document",
    "ParseOptions",
    "parse_document",
    "tokenize_words",
    "apply_phrase_exclusions",
    "load_dictionary",
]


class ParseError(ValueError):
    offset: int = 0


class UnbalancedDelimiter(ParseError):
    def __init__(self, delimiter: str, offset: int):
        self.delimiter = delimiter
        self.offset = offset
        super().__init__(f"unbalanced math delimiter {delimiter!r} at offset {offset}")


class InvalidEncoding(ParseError):
    def __init__(self, offset: int, reason: str = "invalid UTF-8"):
        self.offset = offset
        super().__init__(f"{reason} at byte offset {offset}")


class SegmentKind(str, enum.Enum):
    WORDS = "words"
    FORMULA = "formula"
    EXCLUDED = "excluded"


class ExclusionReason(str, enum.Enum):
    METADATA = "metadata"
    BIBLIOGRAPHY = "bibliography"
    TERM_DICTIONARY = "term_dictionary"
    STOP_PHRASE = "stop_phrase"
    FIGURE = "figure_caption_placeholder"


@dataclass(frozen=True)
class WordToken:
    normalized: str
    start: int
    end: int


@dataclass(frozen=True)
class ExclusionSpan:
    start: int
    end: int
    reason: ExclusionReason


@dataclass(frozen=True)
class Segment:
    """A contiguous slice ``[start, end)`` of the document.

    Excluded segments keep the words and formula they hide so that a scoring
    policy may choose to count them after all.
    """

    kind: SegmentKind
    start: int
    end: int
    words: tuple[WordToken, ...] = ()
    formula: FormulaSpan | None = None
    reason: ExclusionReason | None = None


@dataclass(frozen=True)
class Document:
    source_id: str
    raw_text: str
    segments: tuple[Segment, ...] = ()

    @property
    def exclusions(self) -> tuple[ExclusionSpan, ...]:
        return tuple(
            ExclusionSpan(s.start, s.end, s.reason)
            for s in self.segments
            if s.kind is SegmentKind.EXCLUDED
        )

    @property
    def words(self) -> list[WordToken]:
        return [w for s in self.segments if s.kind is SegmentKind.WORDS for w in s.words]

    @property
    def formulas(self) -> list[FormulaSpan]:
        return [s.formula for s in self.segments if s.kind is SegmentKind.FORMULA]

    def segment_text(self, seg: Segment) -> str:
        return self.raw_text[seg.start : seg.end]


@dataclass(frozen=True)
class ParseOptions:
    source_id: str = "<text>"
    front_matter: bool = True
    bibliography: bool = True
    figures: bool = True


# ---------------------------------------------------------------- words

_DELIMS = ("$", "\\[", "\\]")


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


def tokenize_words(text: str, offset: int = 0) -> list[WordToken]:
    """Whitespace split, edge punctuation stripped, lowercased.

    Inner punctuation survives, so hyphenated and dashed compounds stay one
    word. ``offset`` is added to every token position.

    >>> [w.normalized for w in tokenize_words("Navier–Stokes equations.")]
    ['navier–stokes', 'equations']
    """
    out = []
    for m in re.finditer(r"\S+", text):
        s, e = m.span()
        while s < e and _is_punct(text[s]):
            s += 1
        while e > s and _is_punct(text[e - 1]):
            e -= 1
        if s < e:
            out.append(WordToken(text[s:e].lower(), s + offset, e + offset))
    return out


# ---------------------------------------------------------------- regions

_BIB_HEADING = re.compile(
    r"^[ \t]*#*[ \t]*(references|bibliography|список литературы)[ \t]*:?[ \t]*$",
    re.IGNORECASE | re.MULTILINE,
)
_FIGURE_LINE = re.compile(r"^[ \t]*(\[FIGURE(?::[^\]\n]*)?\])[ \t]*$", re.MULTILINE)
_ENV = re.compile(
    r"\\(?:begin|end)\{(?:aligned|align|gathered|gather|split|eqnarray|multline)\*?\}"
)
# trailing equation label: \quad (i), \qquad (\text{ii}), \tag{3}
_LABEL = re.compile(
    r"(?:\\q?quad\s*\(\s*(?:\\text\s*\{\s*([^{}]*?)\s*\}|([^()\\{}]*?))\s*\)"
    r"|\\tag\*?\s*\{\s*([^{}]*?)\s*\})\s*$"
)
_TRAILING_PUNCT = ",.;"


def _front_matter_end(text: str) -> int:
    """End offset of a leading ``---`` block, 0 if there is none."""
    m = re.match(r"[ \t]*---[ \t]*\r?\n", text)
    if not m:
        return 0
    close = re.compile(r"^[ \t]*---[ \t]*(\r?\n|$)", re.MULTILINE).search(text, m.end())
    if not close:
        return 0
    return close.end()


def _scan_math(text: str, start: int, stop: int):
    """Yield ``(open_at, content_start, content_end, close_end, display)``."""
    i = start
    while i < stop:
        ch = text[i]
        if ch == "\\":
            if text.startswith("\\[", i):
                close = text.find("\\]", i + 2, stop)
                if close < 0:
                    raise UnbalancedDelimiter("\\[", i)
                yield i, i + 2, close, close + 2, True
                i = close + 2
                continue
            if text.startswith("\\]", i):
                raise UnbalancedDelimiter("\\]", i)
            i += 2
            continue
        if ch == "$":
            display = text.startswith("$$", i)
            opener = "$$" if display else "$"
            j = i + len(opener)
            while j < stop:
                if text[j] == "\\":
                    j += 2
                    continue
                if text.startswith(opener, j):
                    break
                if not display and text[j] == "$":
                    break
                j += 1
            else:
                raise UnbalancedDelimiter(opener, i)
            if not text.startswith(opener, j):
                raise UnbalancedDelimiter(opener, i)
            yield i, i + len(opener), j, j + len(opener), display
            i = j + len(opener)
            continue
        i += 1


def _split_rows(text: str, s: int, e: int) -> list[tuple[int, int]]:
    """Split display content at top-level ``\\\\`` row breaks."""
    rows = []
    depth = 0
    cur = s
    k = s
    while k < e:
        ch = text[k]
        if ch == "\\" and k + 1 < e:
            if text[k + 1] == "\\" and depth == 0:
                rows.append((cur, k))
                cur = k + 2
            k += 2
            continue
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        k += 1
    rows.append((cur, e))
    return rows


def _trim(text: str, s: int, e: int, chars: str = "") -> tuple[int, int]:
    while s < e and text[s].isspace():
        s += 1
    while e > s and (text[e - 1].isspace() or text[e - 1] in chars):
        e -= 1
    return s, e


def _math_pieces(text: str, open_at: int, cs: int, ce: int, close_end: int, display: bool):
    """Break one math region into formula rows and label words.

    Returns a list of ``(start, end, kind, payload)`` covering
    ``[open_at, close_end)`` exactly.
    """
    # blank out environment wrappers without shifting offsets
    inner = _ENV.sub(lambda m: " " * len(m.group()), text[cs:ce])
    body = text[:cs] + inner + text[ce:]
    pieces = []
    rows = _split_rows(body, cs, ce) if display else [(cs, ce)]
    for rs, re_ in rows:
        label_words: list[WordToken] = []
        m = _LABEL.search(body, rs, re_)
        if m:
            g = next(k for k in (1, 2, 3) if m.group(k) is not None)
            label_words = tokenize_words(body[m.start(g) : m.end(g)], m.start(g))
            fe = m.start()
        else:
            fe = re_
        fs, fe = _trim(body, rs, fe, _TRAILING_PUNCT)
        if fs < fe:
            try:
                pieces.append([fs, fe, SegmentKind.FORMULA, make_formula(body[fs:fe], fs, display)])
            except EmptyFormula:
                pass
        if label_words:
            pieces.append([m.start(), re_, SegmentKind.WORDS, tuple(label_words)])
    if not pieces:
        raise EmptyFormula(text[open_at:close_end], open_at)
    # stretch pieces so they tile [open_at, close_end)
    pieces[0][0] = open_at
    for prev, nxt in zip(pieces, pieces[1:]):
        prev[1] = nxt[0]
    pieces[-1][1] = close_end
    return [tuple(p) for p in pieces]


def _excluded_words(text: str, s: int, e: int) -> tuple[WordToken, ...]:
    chunk = text[s:e]
    for d in _DELIMS:
        chunk = chunk.replace(d, " " * len(d))
    return tuple(tokenize_words(chunk, s))


def _normalize(pieces: list[Segment]) -> tuple[Segment, ...]:
    """Fold word-less text into a neighbour so that segments tile the text.

    Text without tokens joins the segment before it; at the very start it
    joins the segment after it. If there is nothing else it stays as one
    word-less segment.
    """
    out: list[Segment] = []
    pending_start = None
    pending_end = None
    for p in pieces:
        if p.kind is SegmentKind.WORDS and not p.words:
            if out:
                out[-1] = replace(out[-1], end=p.end)
            else:
                if pending_start is None:
                    pending_start = p.start
                pending_end = p.end
            continue
        if pending_start is not None:
            p = replace(p, start=pending_start)
            pending_start = None
        if (
            out
            and p.kind is SegmentKind.WORDS
            and out[-1].kind is SegmentKind.WORDS
        ):
            out[-1] = replace(out[-1], end=p.end, words=out[-1].words + p.words)
            continue
        out.append(p)
    if not out and pending_start is not None and pending_end > pending_start:
        out.append(Segment(SegmentKind.WORDS, pending_start, pending_end))
    return tuple(out)


def _text_pieces(text: str, s: int, e: int, figures: bool) -> list[Segment]:
    pieces = []
    cur = s
    if figures:
        for m in _FIGURE_LINE.finditer(text, s, e):
            fs, fe = m.span(1)
            pieces.append(Segment(SegmentKind.WORDS, cur, fs, tuple(tokenize_words(text[cur:fs], cur))))
            pieces.append(
                Segment(
                    SegmentKind.EXCLUDED, fs, fe,
                    words=_excluded_words(text, fs, fe),
                    reason=ExclusionReason.FIGURE,
                )
            )
            cur = fe
    pieces.append(Segment(SegmentKind.WORDS, cur, e, tuple(tokenize_words(text[cur:e], cur))))
    return pieces


def parse_document(raw_text: str | bytes, options: ParseOptions | None = None) -> Document:
    """Parse text into an ordered, gap-free list of segments.

    Math is recognized between ``$...$``, ``$$...$$`` and ``\\[...\\]``.
    Display math is split into one formula per ``\\\\`` row; a trailing
    ``\\quad (i)`` or ``\\tag{i}`` label becomes a word. A leading block
    fenced by ``---`` lines is excluded as metadata, and everything from a
    line reading "References" (or "Bibliography", or the Russian heading) on
    is excluded as bibliography.

    Raises:
        InvalidEncoding: ``raw_text`` is bytes and not valid UTF-8.
        UnbalancedDelimiter: a math delimiter has no partner.
        EmptyFormula: a math span holds nothing but whitespace.
    """
    options = options or ParseOptions()
    if isinstance(raw_text, (bytes, bytearray)):
        try:
            raw_text = bytes(raw_text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InvalidEncoding(exc.start, exc.reason) from None
    text = raw_text
    n = len(text)
    pieces: list[Segment] = []

    body_start = _front_matter_end(text) if options.front_matter else 0
    if body_start:
        pieces.append(
            Segment(
                SegmentKind.EXCLUDED, 0, body_start,
                words=_excluded_words(text, 0, body_start),
                reason=ExclusionReason.METADATA,
            )
        )
    body_end = n
    if options.bibliography:
        m = _BIB_HEADING.search(text, body_start)
        if m:
            body_end = m.start()

    cur = body_start
    for open_at, cs, ce, close_end, display in _scan_math(text, body_start, body_end):
        pieces.extend(_text_pieces(text, cur, open_at, options.figures))
        for fs, fe, kind, payload in _math_pieces(text, open_at, cs, ce, close_end, display):
            if kind is SegmentKind.FORMULA:
                pieces.append(Segment(kind, fs, fe, formula=payload))
            else:
                pieces.append(Segment(kind, fs, fe, words=payload))
        cur = close_end
    pieces.extend(_text_pieces(text, cur, body_end, options.figures))

    if body_end < n:
        pieces.append(
            Segment(
                SegmentKind.EXCLUDED, body_end, n,
                words=_excluded_words(text, body_end, n),
                reason=ExclusionReason.BIBLIOGRAPHY,
            )
        )

    segments = _normalize([p for p in pieces if p.end > p.start or p.kind is not SegmentKind.WORDS])
    return _with_alpha(Document(options.source_id, text, segments))


def _with_alpha(doc: Document) -> Document:
    slots = [k for k, s in enumerate(doc.segments) if s.formula is not None]
    renamed = alpha_canonicalize_document(doc.segments[k].formula for k in slots)
    segs = list(doc.segments)
    for k, f in zip(slots, renamed):
        segs[k] = replace(segs[k], formula=f)
    return replace(doc, segments=tuple(segs))


# ---------------------------------------------------------------- dictionaries


@dataclass(frozen=True)
class _Entry:
    words: tuple[str, ...] = ()
    formula_key: tuple | None = None


def _compile_dictionary(dictionary: Iterable[str]) -> tuple[list[_Entry], list[_Entry]]:
    phrases, formulas = [], []
    for raw in dictionary:
        entry = raw.strip()
        if not entry:
            raise ValueError("dictionary entries must be non-empty")
        if entry.startswith("$") and entry.endswith("$") and len(entry.strip("$").strip()) > 0:
            formulas.append(_Entry(formula_key=make_formula(entry.strip("$").strip().rstrip(_TRAILING_PUNCT)).key))
            continue
        words = tuple(w.normalized for w in tokenize_words(entry))
        if not words:
            raise ValueError(f"dictionary entry has no words: {raw!r}")
        phrases.append(_Entry(words=words))
    return phrases, formulas


def _covered(words: Sequence[WordToken], phrases: Sequence[_Entry]) -> list[bool]:
    norm = [w.normalized for w in words]
    hit = [False] * len(norm)
    for e in phrases:
        k = len(e.words)
        for i in range(len(norm) - k + 1):
            if tuple(norm[i : i + k]) == e.words:
                for j in range(i, i + k):
                    hit[j] = True
    return hit


def apply_phrase_exclusions(
    doc: Document,
    dictionary: Iterable[str],
    reason: ExclusionReason = ExclusionReason.TERM_DICTIONARY,
) -> Document:
    """Exclude every occurrence of a dictionary phrase from word segments.

    Matching is case-insensitive on normalized tokens and never crosses a
    formula. A token is excluded if any occurrence of any entry covers it;
    consecutive excluded tokens form one span. Entries written as ``$...$``
    exclude formulas whose canonical form equals theirs.
    """
    phrases, formulas = _compile_dictionary(dictionary)
    if not phrases and not formulas:
        return doc
    fkeys = {e.formula_key for e in formulas}
    pieces: list[Segment] = []
    for seg in doc.segments:
        if seg.kind is SegmentKind.FORMULA:
            if seg.formula.key in fkeys:
                seg = Segment(
                    SegmentKind.EXCLUDED, seg.start, seg.end,
                    formula=seg.formula, reason=reason,
                )
            pieces.append(seg)
            continue
        if seg.kind is not SegmentKind.WORDS:
            pieces.append(seg)
            continue
        hit = _covered(seg.words, phrases)
        if not any(hit):
            pieces.append(seg)
            continue
        cur = seg.start
        k = 0
        words = seg.words
        while k < len(words):
            j = k
            while j < len(words) and hit[j] == hit[k]:
                j += 1
            run = words[k:j]
            if hit[k]:
                pieces.append(Segment(SegmentKind.WORDS, cur, run[0].start))
                pieces.append(
                    Segment(
                        SegmentKind.EXCLUDED, run[0].start, run[-1].end,
                        words=tuple(run), reason=reason,
                    )
                )
                cur = run[-1].end
            else:
                end = words[j].start if j < len(words) else seg.end
                pieces.append(Segment(SegmentKind.WORDS, cur, end, tuple(run)))
                cur = end
            k = j
        if cur < seg.end:
            pieces.append(Segment(SegmentKind.WORDS, cur, seg.end))
    return replace(doc, segments=_normalize(pieces))


def load_dictionary(path: str | Path) -> list[str]:
    """Read a phrase list: one entry per line, ``#`` comments, blanks skipped."""
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out
