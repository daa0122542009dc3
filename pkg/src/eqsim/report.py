"""Serialize similarity reports as ANSI text, standalone HTML or JSON.

JSON layout (``schema_version`` 1; later versions only add keys)::

    {
      "schema_version": 1,
      "mode": "fragment" | "method1" | "method2" | "letters",
      "si_a_given_b": 87.5,            # percent, full precision
      "si_b_given_a": 100.0,
      "policy": {...},                 # Policy fields, exclude as a sorted list
      "counts_a": {...}, "counts_b": {...},
      "tiles": [{"a_start", "a_len", "b_start", "granularity"}],
      "matched_formula_pairs": [[i, j], ...],
      "excluded_a": [{"start", "end", "reason"}], "excluded_b": [...],
      "highlights_a": [[start, end], ...], "highlights_b": [...],
      "flags": ["zero_denominator_a", ...]
    }

Offsets are code-point indices into the document text.
"""

from __future__ import annotations

import enum
import html
import json
from dataclasses import asdict, dataclass
from typing import Sequence

from .matcher import Granularity, MatchTile
from .scoring import Counts, Mode, Policy, SimilarityReport, counted_formulas
from .segmenter import Document, ExclusionReason, ExclusionSpan

__all__ = [
    "Format",
    "RenderedReport",
    "SCHEMA_VERSION",
    "report_to_dict",
    "report_from_dict",
    "render",
    "render_many",
    "fixture_table",
]

SCHEMA_VERSION = 1


class Format(str, enum.Enum):
    TEXT = "text"
    HTML = "html"
    JSON = "json"


@dataclass(frozen=True)
class RenderedReport:
    format: Format
    payload: bytes

    @property
    def text(self) -> str:
        return self.payload.decode("utf-8")


# ---------------------------------------------------------------- json


def report_to_dict(report: SimilarityReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "mode": report.mode.value,
        "si_a_given_b": report.si_a_given_b,
        "si_b_given_a": report.si_b_given_a,
        "policy": report.policy.to_dict(),
        "counts_a": asdict(report.counts_a),
        "counts_b": asdict(report.counts_b),
        "tiles": [
            {"a_start": t.a_start, "a_len": t.a_len, "b_start": t.b_start,
             "granularity": t.granularity.value}
            for t in report.tiles
        ],
        "matched_formula_pairs": [list(p) for p in report.matched_formula_pairs],
        "excluded_a": [_span_dict(e) for e in report.excluded_a],
        "excluded_b": [_span_dict(e) for e in report.excluded_b],
        "highlights_a": [list(h) for h in report.highlights_a],
        "highlights_b": [list(h) for h in report.highlights_b],
        "flags": list(report.flags),
    }


def _span_dict(e: ExclusionSpan) -> dict:
    return {"start": e.start, "end": e.end, "reason": e.reason.value}


def report_from_dict(d: dict) -> SimilarityReport:
    """Inverse of :func:`report_to_dict`; unknown keys are ignored."""
    spans = lambda xs: tuple(  # noqa: E731
        ExclusionSpan(x["start"], x["end"], ExclusionReason(x["reason"])) for x in xs
    )
    return SimilarityReport(
        mode=Mode(d["mode"]),
        si_a_given_b=d["si_a_given_b"],
        si_b_given_a=d["si_b_given_a"],
        policy=Policy.from_dict(d["policy"]),
        counts_a=Counts(**d["counts_a"]),
        counts_b=Counts(**d["counts_b"]),
        tiles=tuple(
            MatchTile(t["a_start"], t["a_len"], t["b_start"], Granularity(t["granularity"]))
            for t in d.get("tiles", [])
        ),
        matched_formula_pairs=tuple(tuple(p) for p in d.get("matched_formula_pairs", [])),
        excluded_a=spans(d.get("excluded_a", [])),
        excluded_b=spans(d.get("excluded_b", [])),
        highlights_a=tuple(tuple(h) for h in d.get("highlights_a", [])),
        highlights_b=tuple(tuple(h) for h in d.get("highlights_b", [])),
        flags=tuple(d.get("flags", [])),
    )


def _dumps(obj) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


# ---------------------------------------------------------------- marks

MATCH, FORMULA, EXCLUDED = "match", "formula-match", "excluded"


def _formula_ranges(report: SimilarityReport, doc: Document, side: int) -> list[tuple[int, int]]:
    if not report.matched_formula_pairs:
        return []
    formulas = counted_formulas(doc, report.policy)
    hit = sorted({p[side] for p in report.matched_formula_pairs})
    return [(formulas[k].start, formulas[k].end) for k in hit if k < len(formulas)]


def _marks(report: SimilarityReport, doc: Document, side: int) -> list[tuple[int, int, str]]:
    """Non-overlapping ``(start, end, class)`` marks, sorted by start."""
    highlights = report.highlights_a if side == 0 else report.highlights_b
    excluded = report.excluded_a if side == 0 else report.excluded_b
    marks = [(s, e, MATCH) for s, e in highlights]
    marks += [(s, e, FORMULA) for s, e in _formula_ranges(report, doc, side)]
    taken = sorted(marks)
    for ex in excluded:
        # exclusions never cover matched tokens, but clip to be safe
        cur = ex.start
        for s, e, _ in taken:
            if e <= cur or s >= ex.end:
                continue
            if s > cur:
                marks.append((cur, s, EXCLUDED))
            cur = max(cur, e)
        if cur < ex.end:
            marks.append((cur, ex.end, EXCLUDED))
    return sorted(marks)


def _counts_rows(report: SimilarityReport) -> list[tuple[str, int, int]]:
    names = {
        Mode.FRAGMENT: ("words", "symbols"),
        Mode.METHOD1: ("formulas",),
        Mode.METHOD2: ("words", "formulas"),
        Mode.LETTERS: ("letters",),
    }[report.mode]
    rows = []
    for unit in names:
        for label, c in (("A", report.counts_a), ("B", report.counts_b)):
            rows.append((f"{unit} ({label})", getattr(c, f"{unit}_matched"), getattr(c, f"{unit}_total")))
    return rows


# ---------------------------------------------------------------- text

_ANSI = {MATCH: "\x1b[31m", FORMULA: "\x1b[31;1m", EXCLUDED: "\x1b[90m"}
_RESET = "\x1b[0m"


def _ansi_body(text: str, marks) -> str:
    out, cur = [], 0
    for s, e, cls in marks:
        out.append(text[cur:s])
        out.append(_ANSI[cls] + text[s:e] + _RESET)
        cur = e
    out.append(text[cur:])
    return "".join(out)


def _render_text(report, doc_a, doc_b, color=True) -> str:
    lines = [
        f"mode: {report.mode.value}",
        f"SI(A|B) = {report.si_a_given_b:.1f}%   [{doc_a.source_id} given {doc_b.source_id}]",
        f"SI(B|A) = {report.si_b_given_a:.1f}%   [{doc_b.source_id} given {doc_a.source_id}]",
    ]
    if report.mode is Mode.METHOD2:
        lines.append(f"formula weight: {report.policy.formula_weight} words")
    if report.flags:
        lines.append("flags: " + ", ".join(report.flags))
    lines.append("")
    lines.append(f"{'unit':<16}{'matched':>9}{'total':>8}")
    for name, m, t in _counts_rows(report):
        lines.append(f"{name:<16}{m:>9}{t:>8}")
    for label, doc, side in (("A", doc_a, 0), ("B", doc_b, 1)):
        lines.append("")
        lines.append(f"--- {label}: {doc.source_id}")
        body = _ansi_body(doc.raw_text, _marks(report, doc, side)) if color else doc.raw_text
        lines.append(body.rstrip("\n"))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- html

_STYLE = {
    MATCH: "color:#c00000;background:#ffe5e5",
    FORMULA: "color:#c00000;background:#ffd0d0;font-weight:bold",
    EXCLUDED: "color:#888888",
}


def _html_body(text: str, marks) -> str:
    out, cur = [], 0
    for s, e, cls in marks:
        out.append(html.escape(text[cur:s]))
        out.append(
            f'<span class="{cls}" data-start="{s}" data-end="{e}" style="{_STYLE[cls]}">'
            f"{html.escape(text[s:e])}</span>"
        )
        cur = e
    out.append(html.escape(text[cur:]))
    return "".join(out)


def _html_section(report, doc_a, doc_b) -> str:
    esc = html.escape
    rows = "".join(
        f"<tr><td style='padding:2px 8px'>{esc(n)}</td>"
        f"<td style='padding:2px 8px;text-align:right'>{m}</td>"
        f"<td style='padding:2px 8px;text-align:right'>{t}</td></tr>"
        for n, m, t in _counts_rows(report)
    )
    cols = "".join(
        f"<div style='flex:1;min-width:0'>"
        f"<h3 style='font-size:15px'>{label}: {esc(doc.source_id)}</h3>"
        f"<pre style='white-space:pre-wrap;font-family:monospace;font-size:13px;"
        f"border:1px solid #ddd;padding:8px' data-side='{label.lower()}'>"
        f"{_html_body(doc.raw_text, _marks(report, doc, side))}</pre></div>"
        for label, doc, side in (("A", doc_a, 0), ("B", doc_b, 1))
    )
    flags = f"<p>flags: {esc(', '.join(report.flags))}</p>" if report.flags else ""
    return (
        f"<section data-mode='{report.mode.value}'>"
        f"<h2 style='font-size:18px'>Mode: {report.mode.value}</h2>"
        f"<p>SI(A|B) = <b>{report.si_a_given_b:.1f}%</b> &nbsp; "
        f"SI(B|A) = <b>{report.si_b_given_a:.1f}%</b></p>{flags}"
        f"<table style='border-collapse:collapse'><tr><th>unit</th><th>matched</th>"
        f"<th>total</th></tr>{rows}</table>"
        f"<div style='display:flex;gap:16px;margin-top:12px'>{cols}</div></section>"
    )


def _html_page(sections: Sequence[str], title: str = "Similarity report") -> str:
    return (
        "<!DOCTYPE html>\n<html><head><meta charset='utf-8'>"
        f"<title>{html.escape(title)}</title></head>"
        "<body style='font-family:sans-serif;margin:16px'>"
        + "<hr>".join(sections)
        + "</body></html>\n"
    )


def render(
    report: SimilarityReport,
    doc_a: Document,
    doc_b: Document,
    format: Format | str = Format.TEXT,
    color: bool = True,
) -> RenderedReport:
    """Render ``report`` for the two documents it was computed from.

    Matched runs are red, whole-formula matches bold red, excluded spans
    gray. JSON ignores the documents.
    """
    fmt = Format(format)
    if fmt is Format.JSON:
        return RenderedReport(fmt, _dumps(report_to_dict(report)))
    if fmt is Format.HTML:
        return RenderedReport(fmt, _html_page([_html_section(report, doc_a, doc_b)]).encode("utf-8"))
    return RenderedReport(fmt, _render_text(report, doc_a, doc_b, color).encode("utf-8"))


def render_many(
    reports: Sequence[SimilarityReport],
    doc_a: Document,
    doc_b: Document,
    format: Format | str = Format.TEXT,
    color: bool = True,
) -> RenderedReport:
    """Several reports on the same pair in one payload.

    JSON wraps them as ``{"schema_version", "a", "b", "reports": [...]}``.
    """
    fmt = Format(format)
    if fmt is Format.JSON:
        return RenderedReport(fmt, _dumps({
            "schema_version": SCHEMA_VERSION,
            "a": doc_a.source_id,
            "b": doc_b.source_id,
            "reports": [report_to_dict(r) for r in reports],
        }))
    if fmt is Format.HTML:
        page = _html_page([_html_section(r, doc_a, doc_b) for r in reports])
        return RenderedReport(fmt, page.encode("utf-8"))
    text = "\n".join(_render_text(r, doc_a, doc_b, color) for r in reports)
    return RenderedReport(fmt, text.encode("utf-8"))


# ---------------------------------------------------------------- fixture table

TABLE_COLUMNS = (
    ("fragment", "a|b"), ("fragment", "b|a"),
    ("method1", "a|b"), ("method1", "b|a"),
    ("method2", "a|b"), ("method2", "b|a"),
    ("letters", "a|b"), ("letters", "b|a"),
)


_SHORT = {"fragment": "frag", "method1": "m1", "method2": "m2", "letters": "let"}


def fixture_table(
    results: Sequence[tuple[str, dict[tuple[str, str], float | None]]],
    format: Format | str = Format.TEXT,
) -> RenderedReport:
    """One row per fixture, one column per mode and direction.

    ``results`` maps ``(mode, "a|b" | "b|a")`` to a percentage, or None when
    the mode does not apply to that fixture.
    """
    if not results:
        raise ValueError("fixture_table needs at least one row")
    fmt = Format(format)
    if fmt is Format.JSON:
        rows = [
            {"fixture": name, **{f"{m}_{d.replace('|', '_given_')}": vals.get((m, d))
                                 for m, d in TABLE_COLUMNS}}
            for name, vals in results
        ]
        return RenderedReport(fmt, _dumps({"schema_version": SCHEMA_VERSION, "fixtures": rows}))
    def cell(v):
        return "-" if v is None else f"{v:.1f}"

    if fmt is Format.HTML:
        esc = html.escape
        td = "style='padding:2px 8px;text-align:right'"
        head = "".join(f"<th {td}>{esc(m)} {esc(d)}</th>" for m, d in TABLE_COLUMNS)
        body = "".join(
            f"<tr><td style='padding:2px 8px'>{esc(name)}</td>"
            + "".join(f"<td {td}>{cell(vals.get(k))}</td>" for k in TABLE_COLUMNS)
            + "</tr>"
            for name, vals in results
        )
        table = (
            f"<table style='border-collapse:collapse'><tr><th>fixture</th>{head}</tr>"
            f"{body}</table>"
        )
        return RenderedReport(fmt, _html_page([table], "Fixture indices").encode("utf-8"))
    width = max(len("fixture"), *(len(n) for n, _ in results)) + 2
    head = "fixture".ljust(width) + "".join(f"{_SHORT[m] + ' ' + d:>12}" for m, d in TABLE_COLUMNS)
    lines = [head, "-" * len(head)]
    for name, vals in results:
        lines.append(name.ljust(width) + "".join(f"{cell(vals.get(k)):>12}" for k in TABLE_COLUMNS))
    text = "\n".join(lines) + "\n"
    return RenderedReport(fmt, text.encode("utf-8"))
