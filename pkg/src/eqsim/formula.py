"""Formula tokenization and canonical forms.

A formula is turned into a flat list of :class:`MathSymbol`. Three views are
kept per formula:

* ``canonical``: every symbol, whitespace dropped. Two formulas are the same
  formula only if these lists are identical.
* ``fragments``: ``canonical`` without brackets, sub/superscript markers and
  bars. This is the lossy view a fragment matcher sees.
* ``alpha_canonical``: ``canonical`` with single-letter identifiers renamed
  by first occurrence across a whole document.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

__all__ = [
    "SymbolKind",
    "MathSymbol",
    "FormulaSpan",
    "EmptyFormula",
    "tokenize_formula",
    "fragment_stream",
    "make_formula",
    "alpha_canonicalize_document",
    "formulas_equal",
    "symbols_text",
]


class EmptyFormula(ValueError):
    def __init__(self, raw: str, offset: int | None = None):
        self.raw = raw
        self.offset = offset
        where = "" if offset is None else f" at offset {offset}"
        super().__init__(f"empty formula{where}: {raw!r}")


class SymbolKind(str, enum.Enum):
    IDENTIFIER = "identifier"
    DIGIT = "digit"
    OPERATOR = "operator"
    STRUCTURAL = "structural"
    CONTROL = "control"


@dataclass(frozen=True)
class MathSymbol:
    kind: SymbolKind
    text: str
    # location inside the formula source; not part of identity
    pos: int = field(default=-1, compare=False, hash=False)
    length: int = field(default=1, compare=False, hash=False)

    def __str__(self) -> str:
        if self.kind is SymbolKind.CONTROL:
            return "\\" + self.text
        return self.text


STRUCTURAL = frozenset("_^{}()[]|")

# spacing and sizing commands carry no content
_IGNORED_COMMANDS = frozenset(
    {
        "quad", "qquad", "left", "right", "big", "Big", "bigg", "Bigg",
        "displaystyle", "textstyle", "nonumber", "notag", "hfill",
    }
)
_IGNORED_ESCAPES = frozenset(",;:! ")

_GREEK = {
    "alpha": "α", "beta": "β", "gamma": "γ", "delta": "δ", "epsilon": "ε",
    "varepsilon": "ϵ", "zeta": "ζ", "eta": "η", "theta": "θ", "vartheta": "ϑ",
    "iota": "ι", "kappa": "κ", "lambda": "λ", "mu": "μ", "nu": "ν", "xi": "ξ",
    "pi": "π", "varpi": "ϖ", "rho": "ρ", "varrho": "ϱ", "sigma": "σ",
    "varsigma": "ς", "tau": "τ", "upsilon": "υ", "phi": "φ", "varphi": "ϕ",
    "chi": "χ", "psi": "ψ", "omega": "ω", "Gamma": "Γ", "Delta": "Δ",
    "Theta": "Θ", "Lambda": "Λ", "Xi": "Ξ", "Pi": "Π", "Sigma": "Σ",
    "Upsilon": "Υ", "Phi": "Φ", "Psi": "Ψ", "Omega": "Ω",
}

# commands whose braced argument is prose, kept as one opaque symbol
_TEXT_COMMANDS = frozenset({"text", "mathrm", "textrm", "operatorname", "mbox"})


def _is_letter(ch: str) -> bool:
    # Latin and Greek only; other scripts fall through to operators
    return ("a" <= ch.lower() <= "z") or ("Ͱ" <= ch <= "Ͽ")


def tokenize_formula(raw: str) -> list[MathSymbol]:
    """Split formula source into symbols.

    ``\\name`` becomes one control symbol (Greek letter commands become
    identifiers), single letters and digits become one symbol each, the
    characters ``_ ^ { } ( ) [ ] |`` are structural, and anything else that
    is not whitespace is an operator. Spacing commands and ``&`` alignment
    markers are dropped. ``\\text{...}`` and friends are kept whole.

    >>> [str(s) for s in tokenize_formula("u_t = au_{xx}")]
    ['u', '_', 't', '=', 'a', 'u', '_', '{', 'x', 'x', '}']
    """
    out: list[MathSymbol] = []
    i, n = 0, len(raw)
    while i < n:
        ch = raw[i]
        if ch.isspace() or ch == "&":
            i += 1
            continue
        if ch == "\\":
            j = i + 1
            while j < n and raw[j].isalpha() and raw[j].isascii():
                j += 1
            if j == i + 1:
                # escaped single character: \{ \| \, ...
                if j >= n:
                    out.append(MathSymbol(SymbolKind.OPERATOR, "\\", i, 1))
                    i = j
                    continue
                esc = raw[j]
                if esc not in _IGNORED_ESCAPES and esc != "\\":
                    out.append(MathSymbol(SymbolKind.OPERATOR, "\\" + esc, i, 2))
                i = j + 1
                continue
            name = raw[i + 1 : j]
            if name in _TEXT_COMMANDS:
                k = j
                while k < n and raw[k].isspace():
                    k += 1
                if k < n and raw[k] == "{":
                    close = _matching_brace(raw, k)
                    body = " ".join(raw[k + 1 : close].split())
                    out.append(MathSymbol(SymbolKind.CONTROL, f"{name}{{{body}}}", i, close + 1 - i))
                    i = close + 1
                    continue
            if name in _GREEK:
                out.append(MathSymbol(SymbolKind.IDENTIFIER, _GREEK[name], i, j - i))
            elif name not in _IGNORED_COMMANDS:
                out.append(MathSymbol(SymbolKind.CONTROL, name, i, j - i))
            i = j
            continue
        if ch in STRUCTURAL:
            kind = SymbolKind.STRUCTURAL
        elif ch.isdigit():
            kind = SymbolKind.DIGIT
        elif _is_letter(ch):
            kind = SymbolKind.IDENTIFIER
        else:
            kind = SymbolKind.OPERATOR
        out.append(MathSymbol(kind, ch, i))
        i += 1
    if not out:
        raise EmptyFormula(raw)
    return out


def _matching_brace(raw: str, open_at: int) -> int:
    depth = 0
    for k in range(open_at, len(raw)):
        if raw[k] == "{" and raw[k - 1] != "\\":
            depth += 1
        elif raw[k] == "}" and raw[k - 1] != "\\":
            depth -= 1
            if depth == 0:
                return k
    return len(raw) - 1


def fragment_stream(canonical: Sequence[MathSymbol]) -> list[MathSymbol]:
    """Drop structural symbols, keep everything else in order."""
    return [s for s in canonical if s.kind is not SymbolKind.STRUCTURAL]


@dataclass(frozen=True)
class FormulaSpan:
    """One atomic formula.

    ``start``/``end`` locate ``raw`` inside the document text; symbol
    ``pos`` values are relative to ``start``.
    """

    raw: str
    canonical: tuple[MathSymbol, ...]
    fragments: tuple[MathSymbol, ...]
    alpha_canonical: tuple[MathSymbol, ...] = ()
    start: int = 0
    end: int = 0
    display: bool = False

    @property
    def key(self) -> tuple[tuple[SymbolKind, str], ...]:
        return tuple((s.kind, s.text) for s in self.canonical)

    @property
    def alpha_key(self) -> tuple[tuple[SymbolKind, str], ...]:
        return tuple((s.kind, s.text) for s in self.alpha_canonical)

    def __len__(self) -> int:
        return len(self.canonical)


def make_formula(raw: str, start: int = 0, display: bool = False) -> FormulaSpan:
    try:
        canonical = tuple(tokenize_formula(raw))
    except EmptyFormula as exc:
        raise EmptyFormula(raw, start) from exc
    return FormulaSpan(
        raw=raw,
        canonical=canonical,
        fragments=tuple(fragment_stream(canonical)),
        alpha_canonical=canonical,
        start=start,
        end=start + len(raw),
        display=display,
    )


def alpha_canonicalize_document(formulas: Iterable[FormulaSpan]) -> list[FormulaSpan]:
    """Rename identifiers by first occurrence across all ``formulas``.

    One mapping serves the whole document, so the same letter gets the same
    synthetic name (``v1``, ``v2``, ...) in every formula. Only identifier
    symbols change.
    """
    mapping: dict[str, str] = {}
    out = []
    for f in formulas:
        renamed = []
        for s in f.canonical:
            if s.kind is SymbolKind.IDENTIFIER:
                name = mapping.setdefault(s.text, f"v{len(mapping) + 1}")
                s = replace(s, text=name)
            renamed.append(s)
        out.append(replace(f, alpha_canonical=tuple(renamed)))
    return out


def formulas_equal(a: FormulaSpan, b: FormulaSpan, alpha: bool = False) -> bool:
    if alpha:
        return a.alpha_key == b.alpha_key
    return a.key == b.key


def symbols_text(symbols: Iterable[MathSymbol]) -> str:
    return " ".join(str(s) for s in symbols)
