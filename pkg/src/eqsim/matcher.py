"""Greedy string tiling over token streams.

The engine behind every index mode: it finds non-overlapping common runs
between two streams, longest first, and stops once the longest remaining
run is shorter than the minimum match length.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

__all__ = [
    "Granularity",
    "MatchTile",
    "BARRIER",
    "BOUNDARY",
    "greedy_string_tiling",
    "tile_mixed",
    "coverage",
    "covered_length",
]


class Granularity(str, enum.Enum):
    WORD = "word"
    SYMBOL = "symbol"
    LETTER = "letter"


@dataclass(frozen=True)
class MatchTile:
    a_start: int
    a_len: int
    b_start: int
    granularity: Granularity = Granularity.WORD

    @property
    def a_end(self) -> int:
        return self.a_start + self.a_len

    @property
    def b_end(self) -> int:
        return self.b_start + self.a_len


class _Barrier:
    """Placeholder that never matches anything, itself included."""

    def __repr__(self) -> str:
        return "BARRIER"


BARRIER = _Barrier()


class _Boundary(_Barrier):
    """Never matches, and also ends a block (see :func:`tile_mixed`)."""

    def __repr__(self) -> str:
        return "BOUNDARY"


BOUNDARY = _Boundary()


def _is_sentinel(tok) -> bool:
    return isinstance(tok, _Barrier)


def _encode(stream_a, stream_b):
    codes: dict = {}
    next_barrier = -1

    def enc(stream):
        nonlocal next_barrier
        out = np.empty(len(stream), dtype=np.int64)
        for k, tok in enumerate(stream):
            if _is_sentinel(tok):
                out[k] = next_barrier
                next_barrier -= 1
            else:
                out[k] = codes.setdefault(tok, len(codes))
        return out

    return enc(stream_a), enc(stream_b)


def _tile(codes_a, codes_b, groups_a, groups_b, min_len_a, blocks=None):
    """Core loop. Runs never cross a change of group id on either side.

    ``min_len_a[i]`` is the minimum accepted length for a run starting at
    ``a[i]``. ``blocks``, if given, is ``(blen_a, blen_b)``: the length of the
    block starting at each position, 0 elsewhere. A run that is a whole block
    on both sides is accepted at any length. Returns ``(a_start, length,
    b_start)`` triples in selection order.
    """
    n, m = len(codes_a), len(codes_b)
    if n == 0 or m == 0:
        return []
    cont_a = np.zeros(n, dtype=bool)
    cont_a[:-1] = groups_a[:-1] == groups_a[1:]
    cont_b = np.zeros(m, dtype=bool)
    cont_b[:-1] = groups_b[:-1] == groups_b[1:]
    free_a = np.ones(n, dtype=bool)
    free_b = np.ones(m, dtype=bool)
    tiles = []

    while True:
        best = 0
        cands: list[tuple[int, int]] = []
        nxt = np.zeros(m + 1, dtype=np.int64)
        for i in range(n - 1, -1, -1):
            if not free_a[i]:
                nxt = np.zeros(m + 1, dtype=np.int64)
                continue
            eq = (codes_b == codes_a[i]) & free_b
            ext = np.where(cont_b & cont_a[i], nxt[1:], 0)
            row = np.zeros(m + 1, dtype=np.int64)
            row[:m] = np.where(eq, ext + 1, 0)
            nxt = row
            run = row[:m]
            valid = run >= min_len_a[i]
            if blocks is not None and blocks[0][i]:
                valid |= (run == blocks[0][i]) & (blocks[1] == blocks[0][i])
            if not valid.any():
                continue
            top = int(run[valid].max())
            if top < best:
                continue
            js = np.flatnonzero(valid & (run == top))
            if top > best:
                best = top
                cands = [(i, int(j)) for j in js]
            else:
                cands.extend((i, int(j)) for j in js)
        if best == 0:
            break
        # rows were visited bottom-up; selection order is smallest a, then b
        cands.sort()
        for i, j in cands:
            if free_a[i : i + best].all() and free_b[j : j + best].all():
                free_a[i : i + best] = False
                free_b[j : j + best] = False
                tiles.append((i, best, j))
    return tiles


def greedy_string_tiling(
    stream_a: Sequence[Hashable],
    stream_b: Sequence[Hashable],
    min_match: int = 2,
    granularity: Granularity = Granularity.WORD,
) -> list[MatchTile]:
    """Tile two token streams with greedy string tiling.

    Repeatedly takes the longest common contiguous run that overlaps no
    earlier tile in either stream; equal lengths are broken by the smallest
    start in ``stream_a``, then in ``stream_b``. Stops when the longest
    remaining run is shorter than ``min_match``. Tokens equal to
    :data:`BARRIER` never match.

    Tiles are returned in selection order.
    """
    if min_match < 1:
        raise ValueError(f"min_match must be >= 1, got {min_match}")
    codes_a, codes_b = _encode(stream_a, stream_b)
    groups_a = np.zeros(len(codes_a), dtype=np.int64)
    groups_b = np.zeros(len(codes_b), dtype=np.int64)
    mins = np.full(len(codes_a), min_match, dtype=np.int64)
    return [
        MatchTile(i, k, j, granularity)
        for i, k, j in _tile(codes_a, codes_b, groups_a, groups_b, mins)
    ]


def tile_mixed(
    stream_a: Sequence[tuple[Granularity, Hashable]],
    stream_b: Sequence[tuple[Granularity, Hashable]],
    min_match: Mapping[Granularity, int],
    whole_blocks: bool = True,
) -> list[MatchTile]:
    """Tile streams whose tokens are ``(granularity, value)`` pairs.

    A run never spans tokens of different granularity, and each run must
    reach the minimum length configured for its own granularity. Tokens of
    different granularity never compare equal. A bare :data:`BARRIER` or
    :data:`BOUNDARY` in place of a pair is allowed; neither matches.

    A block is a maximal stretch of same-granularity tokens between
    boundaries (barriers do not end a block). With ``whole_blocks`` set, a
    run that covers an entire block in both streams counts whatever its
    length: a passage that is complete on its own is not a short sequence.
    """
    for g, k in min_match.items():
        if k < 1:
            raise ValueError(f"min_match[{g}] must be >= 1, got {k}")
    codes_a, codes_b = _encode(stream_a, stream_b)
    order = list(Granularity)

    def group_ids(stream):
        return np.array(
            [-1 if _is_sentinel(tok) else order.index(tok[0]) for tok in stream],
            dtype=np.int64,
        )

    groups_a = group_ids(stream_a)
    groups_b = group_ids(stream_b)
    big = max(len(stream_a), len(stream_b)) + 1
    mins = np.array(
        [big if _is_sentinel(tok) else min_match[tok[0]] for tok in stream_a],
        dtype=np.int64,
    )
    blocks = (_block_lengths(stream_a), _block_lengths(stream_b)) if whole_blocks else None
    return [
        MatchTile(i, k, j, stream_a[i][0])
        for i, k, j in _tile(codes_a, codes_b, groups_a, groups_b, mins, blocks)
    ]


def _block_lengths(stream) -> np.ndarray:
    """Length of the block starting at each position, 0 elsewhere.

    Barriers belong to the block around them, so a block holding excluded
    text can never be covered by a single run.
    """
    out = np.zeros(len(stream), dtype=np.int64)
    start, kind = None, None
    for k, tok in enumerate(stream):
        if tok is BOUNDARY:
            if start is not None:
                out[start] = k - start
            start, kind = None, None
            continue
        g = None if tok is BARRIER else tok[0]
        if start is not None and g is not None and kind is not None and g != kind:
            out[start] = k - start
            start, kind = None, None
        if start is None:
            start = k
        if kind is None:
            kind = g
    if start is not None:
        out[start] = len(stream) - start
    return out


def covered_length(tiles: Sequence[MatchTile]) -> int:
    return sum(t.a_len for t in tiles)


def coverage(tiles: Sequence[MatchTile], stream_len: int) -> float:
    """Fraction of a stream of ``stream_len`` tokens covered by ``tiles``."""
    if stream_len == 0:
        return 0.0
    return covered_length(tiles) / stream_len
