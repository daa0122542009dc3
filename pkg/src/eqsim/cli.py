"""Command-line entry point.

    eqsim compare A B [--mode ...] [--format text|json|html] [--out PATH]
    eqsim batch A DIR [--out DIR]
    eqsim fixtures

Exit codes: 0 success, 1 usage error or unreadable input, 2 parse error,
3 fixture regression.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .fixtures import check_bounds, run_fixtures
from .report import Format, fixture_table, render, render_many, report_to_dict
from .scoring import ALL_EXCLUSIONS, Mode, Policy, score
from .segmenter import (
    Document,
    EmptyFormula,
    ExclusionReason,
    ParseError,
    ParseOptions,
    apply_phrase_exclusions,
    load_dictionary,
    parse_document,
)

log = logging.getLogger("eqsim")

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_REGRESSION = 0, 1, 2, 3
TERMS_ENV = "EQSIM_TERMS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_policy_flags(p: argparse.ArgumentParser, default_mode: str, allow_all: bool):
    modes = [m.value for m in Mode] + (["all"] if allow_all else [])
    p.add_argument("--mode", choices=modes, default=default_mode)
    p.add_argument("--min-words", type=int, default=8, help="shortest counted word run")
    p.add_argument("--min-symbols", type=int, default=1, help="shortest counted symbol run")
    p.add_argument("--min-letters", type=int, default=3, help="shortest counted letter run")
    p.add_argument("--formula-weight", type=int, default=8, help="words per formula (method2)")
    p.add_argument("--min-formula-symbols", type=int, default=1,
                   help="ignore formulas with fewer symbols")
    p.add_argument("--alpha", action="store_true", help="compare formulas up to letter renaming")
    p.add_argument("--terms", action="append", default=None, metavar="FILE",
                   help=f"term dictionary (repeatable; default ${TERMS_ENV})")
    p.add_argument("--stop-phrases", action="append", default=None, metavar="FILE")
    p.add_argument("--no-bibliography-exclude", action="store_true")
    p.add_argument("--no-metadata-exclude", action="store_true")
    p.add_argument("--count-short", action="store_true",
                   help="count word runs shorter than --min-words")
    p.add_argument("--format", choices=[f.value for f in Format], default="text")
    p.add_argument("--no-color", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eqsim", description="Similarity indices for texts with formulas.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compare", help="compare two documents")
    p.add_argument("path_a")
    p.add_argument("path_b")
    _add_policy_flags(p, "method2", allow_all=True)
    p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("batch", help="compare one document against every file in a directory")
    p.add_argument("path_a")
    p.add_argument("dir")
    _add_policy_flags(p, "method2", allow_all=False)
    p.add_argument("--out", help="directory for per-pair JSON reports")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("fixtures", help="run the bundled worked examples")
    _add_policy_flags(p, "method2", allow_all=True)
    p.add_argument("--out")
    return parser


@dataclass(frozen=True)
class Settings:
    policy: Policy
    terms: tuple[str, ...]
    stop_phrases: tuple[str, ...]


def _settings(args, mode: Mode) -> Settings:
    exclude = set(ALL_EXCLUSIONS)
    if args.no_bibliography_exclude:
        exclude.discard(ExclusionReason.BIBLIOGRAPHY)
    if args.no_metadata_exclude:
        exclude.discard(ExclusionReason.METADATA)
    try:
        policy = Policy(
            mode=mode,
            word_min_match=args.min_words,
            symbol_min_match=args.min_symbols,
            letter_min_match=args.min_letters,
            formula_weight=args.formula_weight,
            min_formula_symbols=args.min_formula_symbols,
            alpha=args.alpha,
            exclude=frozenset(exclude),
            short_sequences=not args.count_short,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    term_files = args.terms
    if term_files is None and os.environ.get(TERMS_ENV):
        term_files = [os.environ[TERMS_ENV]]
    return Settings(policy, _read_dicts(term_files), _read_dicts(args.stop_phrases))


def _read_dicts(paths) -> tuple[str, ...]:
    out: list[str] = []
    for path in paths or ():
        try:
            out.extend(load_dictionary(path))
        except OSError as exc:
            raise UsageError(f"cannot read dictionary {path}: {exc.strerror}") from None
    return tuple(out)


def _modes(args) -> list[Mode]:
    if args.mode == "all":
        return [Mode.FRAGMENT, Mode.METHOD1, Mode.METHOD2]
    return [Mode(args.mode)]


def load_document(path: str | Path, settings: Settings) -> Document:
    """Read and parse one file. OSError and ParseError propagate."""
    raw = Path(path).read_bytes()
    doc = parse_document(raw, ParseOptions(source_id=str(path)))
    if settings.terms:
        doc = apply_phrase_exclusions(doc, settings.terms, ExclusionReason.TERM_DICTIONARY)
    if settings.stop_phrases:
        doc = apply_phrase_exclusions(doc, settings.stop_phrases, ExclusionReason.STOP_PHRASE)
    return doc


def _with_mode(policy: Policy, mode: Mode) -> Policy:
    d = policy.to_dict()
    d["mode"] = mode
    return Policy.from_dict(d)


def _emit(payload: bytes, out: str | None):
    if out:
        Path(out).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()


def _parse_error(path, exc: ParseError | EmptyFormula) -> int:
    offset = getattr(exc, "offset", None)
    print(f"eqsim: {path}: parse error at offset {offset}: {exc}", file=sys.stderr)
    return EXIT_PARSE


def cmd_compare(args) -> int:
    modes = _modes(args)
    settings = _settings(args, modes[0])
    docs = []
    for path in (args.path_a, args.path_b):
        try:
            docs.append(load_document(path, settings))
        except OSError as exc:
            print(f"eqsim: cannot read {path}: {exc.strerror}", file=sys.stderr)
            return EXIT_USAGE
        except (ParseError, EmptyFormula) as exc:
            return _parse_error(path, exc)
    doc_a, doc_b = docs
    reports = [score(doc_a, doc_b, _with_mode(settings.policy, m)) for m in modes]
    fmt = Format(args.format)
    if len(reports) == 1:
        out = render(reports[0], doc_a, doc_b, fmt, color=not args.no_color and not args.out)
    else:
        out = render_many(reports, doc_a, doc_b, fmt, color=not args.no_color and not args.out)
    _emit(out.payload, args.out)
    return EXIT_OK


def _batch_one(job):
    path, path_a, settings = job
    try:
        doc_a = load_document(path_a, settings)
        doc_b = load_document(path, settings)
    except OSError as exc:
        return path, None, f"unreadable: {exc.strerror}"
    except (ParseError, EmptyFormula) as exc:
        return path, None, f"parse error at offset {getattr(exc, 'offset', None)}: {exc}"
    return path, score(doc_a, doc_b, settings.policy), None


def cmd_batch(args) -> int:
    settings = _settings(args, Mode(args.mode))
    try:
        load_document(args.path_a, settings)
    except OSError as exc:
        print(f"eqsim: cannot read {args.path_a}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, EmptyFormula) as exc:
        return _parse_error(args.path_a, exc)
    folder = Path(args.dir)
    if not folder.is_dir():
        print(f"eqsim: not a directory: {folder}", file=sys.stderr)
        return EXIT_USAGE
    files = sorted(p for p in folder.iterdir() if p.is_file())
    if not files:
        print(f"eqsim: no documents in {folder}", file=sys.stderr)
        return EXIT_USAGE

    jobs = [(str(p), args.path_a, settings) for p in files]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_batch_one, jobs))
    else:
        results = [_batch_one(j) for j in jobs]

    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    scored, skipped = [], []
    for path, report, err in results:
        if report is None:
            skipped.append((path, err))
            print(f"eqsim: skipped {path}: {err}", file=sys.stderr)
            continue
        scored.append((path, report))
        if out_dir:
            payload = json.dumps(
                {"a": args.path_a, "b": path, "report": report_to_dict(report)},
                indent=2, sort_keys=True, ensure_ascii=False,
            )
            (out_dir / (Path(path).name + ".json")).write_text(payload + "\n", encoding="utf-8")

    ranked = sorted(scored, key=lambda pr: (-pr[1].si_a_given_b, pr[0]))
    if args.format == "json":
        payload = {
            "schema_version": 1,
            "a": args.path_a,
            "mode": args.mode,
            "results": [
                {"b": p, "si_a_given_b": r.si_a_given_b, "si_b_given_a": r.si_b_given_a}
                for p, r in ranked
            ],
            "skipped": [{"b": p, "error": e} for p, e in skipped],
        }
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        width = max(len(p) for p, _ in results) + 2
        print(f"{'document':<{width}}{'SI(A|doc)':>11}{'SI(doc|A)':>11}")
        for p, r in ranked:
            print(f"{p:<{width}}{r.si_a_given_b:>11.1f}{r.si_b_given_a:>11.1f}")
        for p, e in skipped:
            print(f"{p:<{width}}{'skipped':>11}  {e}")
    return EXIT_OK


def cmd_fixtures(args) -> int:
    settings = _settings(args, Mode.METHOD2)
    rows = run_fixtures(policy=settings.policy)
    table = fixture_table(rows, args.format if args.format != "html" else "html")
    checks = check_bounds(rows)
    _emit(table.payload, args.out)
    for c in checks:
        print(f"[{'PASS' if c.ok else 'FAIL'}] {c.name}: {c.detail}", file=sys.stderr)
    return EXIT_OK if all(c.ok for c in checks) else EXIT_REGRESSION


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
    )
    handler = {"compare": cmd_compare, "batch": cmd_batch, "fixtures": cmd_fixtures}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"eqsim: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
