import json
import subprocess
import sys
from importlib import resources

import pytest

from eqsim.cli import main

FIX = resources.files("eqsim.fixtures")


def fx(name):
    return str(FIX.joinpath(name))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compare_json(capsys):
    code, out, _ = run(capsys, "compare", fx("tp1_v1.txt"), fx("tp1_v2.txt"),
                       "--mode", "method1", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["mode"] == "method1"
    assert d["counts_a"]["formulas_matched"] == 4


def test_compare_all_modes(capsys):
    code, out, _ = run(capsys, "compare", fx("tp1_v1.txt"), fx("tp1_v2.txt"),
                       "--mode", "all", "--format", "json")
    assert code == 0
    assert [r["mode"] for r in json.loads(out)["reports"]] == ["fragment", "method1", "method2"]


def test_fragment_direction(capsys):
    # the shorter second version is the one more covered by the first
    _, out, _ = run(capsys, "compare", fx("tp1_v2.txt"), fx("tp1_v1.txt"),
                    "--mode", "fragment", "--format", "json")
    d = json.loads(out)
    assert d["si_a_given_b"] > d["si_b_given_a"]


def test_compare_writes_html(capsys, tmp_path):
    out = tmp_path / "r.html"
    code, stdout, _ = run(capsys, "compare", fx("tp1_v1.txt"), fx("tp1_v2.txt"),
                          "--format", "html", "--out", str(out))
    assert code == 0 and stdout == ""
    assert out.read_text(encoding="utf-8").startswith("<!DOCTYPE html>")


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "compare", str(tmp_path / "nope.txt"), fx("tp1_v1.txt"))
    assert code == 1
    assert "nope.txt" in err


def test_parse_error_names_file_and_offset(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("text $x + 1\n", encoding="utf-8")
    code, _, err = run(capsys, "compare", str(bad), fx("tp1_v1.txt"))
    assert code == 2
    assert "bad.txt" in err and "offset 5" in err


def test_bad_option_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["compare", "a", "b", "--mode", "nonsense"])
    assert exc.value.code == 1
    code, _, err = run(capsys, "compare", fx("tp1_v1.txt"), fx("tp1_v2.txt"), "--min-words", "0")
    assert code == 1


def test_terms_file_and_env(capsys, tmp_path, monkeypatch):
    terms = tmp_path / "terms.txt"
    terms.write_text("pantograph-type\n", encoding="utf-8")
    args = ("compare", fx("tp1_v1.txt"), fx("tp1_v2.txt"), "--format", "json")
    _, out, _ = run(capsys, *args, "--terms", str(terms))
    with_flag = json.loads(out)
    assert with_flag["counts_a"]["words_total"] == 53
    monkeypatch.setenv("EQSIM_TERMS", str(terms))
    _, out, _ = run(capsys, *args)
    assert json.loads(out) == with_flag


def test_missing_dictionary(capsys, tmp_path):
    code, _, _ = run(capsys, "compare", fx("tp1_v1.txt"), fx("tp1_v2.txt"),
                     "--terms", str(tmp_path / "none.txt"))
    assert code == 1


@pytest.fixture
def corpus(tmp_path):
    d = tmp_path / "corpus"
    d.mkdir()
    for name in ("tp1_v1.txt", "tp1_v2.txt", "tp1_v1_es.txt", "tp2_left.txt"):
        (d / name).write_text(FIX.joinpath(name).read_text(encoding="utf-8"), encoding="utf-8")
    (d / "broken.txt").write_text("open $x", encoding="utf-8")
    return d


def test_batch_ranks_and_skips(capsys, corpus, tmp_path):
    out_dir = tmp_path / "out"
    code, out, err = run(capsys, "batch", fx("tp1_v1.txt"), str(corpus),
                         "--format", "json", "--out", str(out_dir))
    assert code == 0
    d = json.loads(out)
    names = [r["b"].rsplit("/", 1)[-1] for r in d["results"]]
    assert names[0] == "tp1_v1.txt"
    scores = [r["si_a_given_b"] for r in d["results"]]
    assert scores == sorted(scores, reverse=True)
    assert [s["b"].rsplit("/", 1)[-1] for s in d["skipped"]] == ["broken.txt"]
    assert "broken.txt" in err
    assert len(list(out_dir.glob("*.json"))) == 4


def test_batch_parallel_matches_serial(capsys, corpus):
    _, serial, _ = run(capsys, "batch", fx("tp1_v1.txt"), str(corpus), "--format", "json")
    _, parallel, _ = run(capsys, "batch", fx("tp1_v1.txt"), str(corpus), "--format", "json", "--jobs", "2")
    assert serial == parallel


def test_batch_empty_dir(capsys, tmp_path):
    code, _, _ = run(capsys, "batch", fx("tp1_v1.txt"), str(tmp_path))
    assert code == 1


def test_fixtures_command(capsys):
    code, out, err = run(capsys, "fixtures", "--format", "json")
    assert code == 0
    assert len(json.loads(out)["fixtures"]) >= 8
    assert "[FAIL]" not in err


def test_json_output_is_byte_identical_across_processes():
    cmd = [sys.executable, "-m", "eqsim", "compare", fx("tp1_v1.txt"), fx("tp1_v2.txt"),
           "--mode", "all", "--format", "json"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first
