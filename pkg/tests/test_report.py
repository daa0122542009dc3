import json
import re

import pytest

from eqsim.fixtures import fixture_document, run_fixtures
from eqsim.report import (
    Format,
    TABLE_COLUMNS,
    fixture_table,
    render,
    render_many,
    report_from_dict,
    report_to_dict,
)
from eqsim.scoring import Mode, Policy, score
from eqsim.segmenter import apply_phrase_exclusions, parse_document


@pytest.fixture(scope="module")
def docs():
    return fixture_document("tp1_v1.txt"), fixture_document("tp1_v2.txt")


@pytest.mark.parametrize("mode", list(Mode))
def test_json_round_trip(docs, mode):
    r = score(*docs, Policy(mode=mode))
    assert report_from_dict(report_to_dict(r)) == r
    payload = render(r, *docs, Format.JSON).payload
    assert report_from_dict(json.loads(payload)) == r


def test_json_is_byte_stable(docs):
    r1 = score(*docs, Policy())
    r2 = score(*docs, Policy())
    assert render(r1, *docs, "json").payload == render(r2, *docs, "json").payload


def test_empty_documents_render():
    a = b = parse_document("")
    r = score(a, b, Policy())
    for fmt in Format:
        assert render(r, a, b, fmt).payload


def _spans(html_text, side, cls):
    pre = re.search(rf"<pre[^>]*data-side='{side}'>(.*?)</pre>", html_text, re.S).group(1)
    return [
        (int(s), int(e))
        for s, e in re.findall(rf'<span class="{cls}" data-start="(\d+)" data-end="(\d+)"', pre)
    ]


@pytest.mark.parametrize("mode", [Mode.FRAGMENT, Mode.METHOD2])
def test_html_highlights_are_the_report_ranges(docs, mode):
    r = score(*docs, Policy(mode=mode))
    page = render(r, *docs, Format.HTML).text
    assert _spans(page, "a", "match") == list(r.highlights_a)
    assert _spans(page, "b", "match") == list(r.highlights_b)


def test_html_marks_whole_formulas(docs):
    r = score(*docs, Policy(mode=Mode.METHOD1))
    page = render(r, *docs, Format.HTML).text
    spans = _spans(page, "a", "formula-match")
    assert len(spans) == 4
    texts = [docs[0].raw_text[s:e] for s, e in spans]
    assert texts == ["u(x, t) = f(x)g(t)", "f = f(x)", "g = g(t)", "k"]


def test_html_is_self_contained(docs):
    page = render(score(*docs, Policy()), *docs, "html").text
    assert page.startswith("<!DOCTYPE html>")
    for needle in ("<script", "<link", "http://", "https://"):
        assert needle not in page


def test_html_escapes_text():
    a = parse_document("x < y & $z$")
    page = render(score(a, a, Policy(mode=Mode.METHOD1)), a, a, "html").text
    assert "x &lt; y &amp;" in page


def test_excluded_spans_are_gray(docs):
    a, b = (apply_phrase_exclusions(d, ["pantograph-type"]) for d in docs)
    r = score(a, b, Policy())
    page = render(r, a, b, "html").text
    assert _spans(page, "a", "excluded")


def test_text_report_without_color(docs):
    out = render(score(*docs, Policy()), *docs, "text", color=False).text
    assert "\x1b[" not in out
    assert "SI(A|B)" in out and "formula weight: 8" in out


def test_text_report_colors_matches(docs):
    out = render(score(*docs, Policy()), *docs, "text", color=True).text
    assert "\x1b[31m" in out


def test_render_many_json(docs):
    reports = [score(*docs, Policy(mode=m)) for m in (Mode.FRAGMENT, Mode.METHOD1)]
    d = json.loads(render_many(reports, *docs, "json").payload)
    assert d["schema_version"] == 1
    assert [x["mode"] for x in d["reports"]] == ["fragment", "method1"]


def test_fixture_table_formats():
    rows = run_fixtures()
    text = fixture_table(rows, "text").text
    assert len(text.splitlines()) == len(rows) + 2
    d = json.loads(fixture_table(rows, "json").payload)
    assert len(d["fixtures"]) == len(rows) >= 8
    assert "<table" in fixture_table(rows, "html").text
    assert len(TABLE_COLUMNS) == 8
    with pytest.raises(ValueError):
        fixture_table([], "text")
