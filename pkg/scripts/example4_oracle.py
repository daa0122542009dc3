"""Letter-level tiling of the two example phrases, by exhaustive search.

Prints the covered letters for each minimum run length next to the fast
matcher's answer, and the tiles chosen at the default minimum.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from eqsim.matcher import covered_length, greedy_string_tiling  # noqa: E402
from oracles import brute_tiling  # noqa: E402

A = "The solute was in a container"
B = "The exact solution was obtained"


def letters(s):
    return [c.lower() for c in s if not c.isspace()]


def main():
    a, b = letters(A), letters(B)
    print(f"A has {len(a)} letters, B has {len(b)}")
    for k in range(1, 7):
        brute = brute_tiling(a, b, k)
        fast = covered_length(greedy_string_tiling(a, b, k))
        cov = sum(n for _, n, _ in brute)
        print(f"min {k}: oracle {cov:2d}/{len(a)} = {100 * cov / len(a):6.2f}%   fast {fast}")
    print("tiles at min 3:")
    for i, n, j in brute_tiling(a, b, 3):
        print(f"  A[{i}:{i + n}] = {''.join(a[i:i + n])!r}  B[{j}:{j + n}]")


if __name__ == "__main__":
    main()
