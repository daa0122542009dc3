"""Worked examples bundled with the package.

Each fixture is a pair of documents. Direction ``a|b`` is the share of A
found in B. The bounds in :func:`check_bounds` are the regression gate used
by ``eqsim fixtures``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..scoring import Mode, Policy, letter_fragment_demo, score
from ..segmenter import Document, ParseOptions, parse_document

__all__ = ["Fixture", "FIXTURES", "fixture_text", "fixture_document", "run_fixtures", "check_bounds", "Check"]

ALL_MODES = (Mode.FRAGMENT, Mode.METHOD1, Mode.METHOD2)

# Example 4 reductio: letters of "the solute was in a container" covered by
# tiles of length >= 3 against "the exact solution was obtained"
EXAMPLE4_COVERED = 16
EXAMPLE4_TOTAL = 24


@lru_cache(maxsize=None)
def fixture_text(name: str) -> str:
    return resources.files(__name__).joinpath(name).read_text(encoding="utf-8")


def fixture_document(name: str) -> Document:
    return parse_document(fixture_text(name), ParseOptions(source_id=name))


@dataclass(frozen=True)
class Fixture:
    name: str
    a: str
    b: str
    modes: tuple[Mode, ...] = ALL_MODES
    # plain phrases, compared letter by letter rather than parsed
    phrases: bool = False

    def documents(self) -> tuple[Document, Document]:
        return _doc(self.a, "A"), _doc(self.b, "B")


def _doc(spec: str, label: str) -> Document:
    if spec.endswith(".txt"):
        return fixture_document(spec)
    return parse_document(spec, ParseOptions(source_id=label))


FIXTURES: tuple[Fixture, ...] = (
    Fixture("student wave|heat", "$u_{tt} = au_{xx}$", "$u_t = au_{xx}$"),
    Fixture("example 1", "$g = 1 + |z| + |f|^{1/2}$", "$g = (1 + |z| + |f|)^{1/2}$"),
    Fixture("example 2", "$y = a + bx^{-1/2}$", "$y = a + bx - 1/2$"),
    Fixture("example 3", "$u_t = [f(u)u_x]_x + g(u)$", "$u_{tt} = [f(u)u_x]_x + g(u)$"),
    Fixture(
        "example 4 letters",
        "The solute was in a container",
        "The exact solution was obtained",
        modes=(Mode.FRAGMENT, Mode.METHOD2, Mode.LETTERS),
        phrases=True,
    ),
    Fixture("test problem 1 v1|v2", "tp1_v1.txt", "tp1_v2.txt"),
    Fixture("test problem 2 left|right", "tp2_left.txt", "tp2_right.txt"),
    Fixture("test problem 1 en|es", "tp1_v1.txt", "tp1_v1_es.txt"),
    Fixture("self test problem 1", "tp1_v1.txt", "tp1_v1.txt", modes=ALL_MODES + (Mode.LETTERS,)),
    Fixture("self test problem 2", "tp2_left.txt", "tp2_left.txt"),
)


def run_fixtures(
    fixtures=FIXTURES, policy: Policy | None = None
) -> list[tuple[str, dict[tuple[str, str], float | None]]]:
    """Score every fixture under each of its modes.

    ``policy`` supplies everything but the mode.
    """
    base = policy or Policy()
    rows = []
    for fx in fixtures:
        doc_a, doc_b = fx.documents()
        vals: dict[tuple[str, str], float | None] = {}
        for mode in fx.modes:
            if mode is Mode.LETTERS and fx.phrases:
                r = letter_fragment_demo(fx.a, fx.b, base.letter_min_match)
            else:
                r = score(doc_a, doc_b, _with_mode(base, mode))
            vals[(mode.value, "a|b")] = r.si_a_given_b
            vals[(mode.value, "b|a")] = r.si_b_given_a
        rows.append((fx.name, vals))
    return rows


def _with_mode(policy: Policy, mode: Mode) -> Policy:
    d = policy.to_dict()
    d["mode"] = mode
    return Policy.from_dict(d)


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str


def check_bounds(rows) -> list[Check]:
    """Bounds every default run must satisfy."""
    by = dict(rows)
    checks = []

    def add(name, ok, detail):
        checks.append(Check(name, bool(ok), detail))

    v = by["student wave|heat"][("fragment", "a|b")]
    add("student fragment SI(wave|heat) == 87.5", v == 87.5, f"{v!r}")
    for fx in ("example 1", "example 2"):
        vals = by[fx]
        frag = (vals[("fragment", "a|b")], vals[("fragment", "b|a")])
        m1 = (vals[("method1", "a|b")], vals[("method1", "b|a")])
        add(f"{fx} fragment == 100 both ways", frag == (100.0, 100.0), f"{frag}")
        add(f"{fx} method1 == 0 both ways", m1 == (0.0, 0.0), f"{m1}")
    v = by["example 4 letters"][("letters", "a|b")]
    add("example 4 letters in [60, 75]", 60.0 <= v <= 75.0, f"{v:.4f}")
    add(
        "example 4 letters == 16/24",
        v == 100.0 * EXAMPLE4_COVERED / EXAMPLE4_TOTAL,
        f"{v:.4f}",
    )
    for fx in ("test problem 1 v1|v2", "test problem 2 left|right"):
        vals = by[fx]
        for d in ("a|b", "b|a"):
            f, m2 = vals[("fragment", d)], vals[("method2", d)]
            add(f"{fx} fragment >= method2 ({d})", f >= m2, f"{f:.2f} >= {m2:.2f}")
    for fx in ("self test problem 1", "self test problem 2"):
        vals = by[fx]
        bad = {k: x for k, x in vals.items() if x != 100.0}
        add(f"{fx} == 100 everywhere", not bad, f"{bad or 'ok'}")
    return checks
