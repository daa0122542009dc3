"""Print every fixture's indices with the exact counts behind them.

    python3 scripts/run_fixtures.py [--mode fragment|method1|method2|letters]
"""

import argparse
from eqsim.fixtures import FIXTURES
from eqsim.scoring import Mode, Policy, score


def fraction(counts, mode, w) -> str:
    """Numerator and denominator as counted, unreduced."""
    c = counts
    if mode is Mode.FRAGMENT:
        num, den = c.words_matched + c.symbols_matched, c.words_total + c.symbols_total
    elif mode is Mode.METHOD1:
        num, den = c.formulas_matched, c.formulas_total
    elif mode is Mode.METHOD2:
        num, den = c.words_matched + w * c.formulas_matched, c.words_total + w * c.formulas_total
    else:
        num, den = c.letters_matched, c.letters_total
    return f"{num}/{den}"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--mode", choices=[m.value for m in Mode], action="append")
    ap.add_argument("--formula-weight", type=int, default=8)
    args = ap.parse_args()
    modes = [Mode(m) for m in args.mode] if args.mode else [Mode.FRAGMENT, Mode.METHOD1, Mode.METHOD2]

    for fx in FIXTURES:
        if fx.phrases:
            continue
        a, b = fx.documents()
        for mode in modes:
            r = score(a, b, Policy(mode=mode, formula_weight=args.formula_weight))
            fa = fraction(r.counts_a, mode, args.formula_weight)
            fb = fraction(r.counts_b, mode, args.formula_weight)
            flags = f"  {','.join(r.flags)}" if r.flags else ""
            print(f"{fx.name:<28}{mode.value:<10}"
                  f"{r.si_a_given_b:8.2f} {fa:>9}{r.si_b_given_a:10.2f} {fb:>9}{flags}")


if __name__ == "__main__":
    main()
