"""Literal brute-force evaluation of the norm, for testing only.

Enumerates every family E_1 < ... < E_r of arbitrary nonempty subsets of the
support (not just intervals) and recurses on each E_i x.  Exponential; the
support is capped at ``ORACLE_LIMIT``.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .vectors import SparseVector

ORACLE_LIMIT = 6


class OracleLimitExceeded(ValueError):
    pass


def _families(n: int):
    """All labelings of positions 0..n-1 with labels 0 (unused) or 1..r,
    nonzero labels nondecreasing and covering 1..r, r >= 2.

    Each yields a list of r tuples of positions, the successive sets.
    """

    def rec(pos, sets):
        if pos == n:
            if len(sets) >= 2:
                yield [tuple(s) for s in sets]
            return
        # skip this position
        yield from rec(pos + 1, sets)
        # add to the current (last) set
        if sets:
            sets[-1].append(pos)
            yield from rec(pos + 1, sets)
            sets[-1].pop()
        # open a new set
        sets.append([pos])
        yield from rec(pos + 1, sets)
        sets.pop()

    yield from rec(0, [])


@lru_cache(maxsize=None)
def _bf(entries: tuple[tuple[int, float], ...]) -> float:
    sup = max((abs(v) for _, v in entries), default=0.0)
    n = len(entries)
    if n <= 1:
        return sup
    best = sup
    for sets in _families(n):
        total = sum(_bf(tuple(entries[p] for p in s)) for s in sets)
        best = max(best, total / math.log2(len(sets) + 1))
    return best


def brute_force_norm(x: SparseVector) -> float:
    if len(x) > ORACLE_LIMIT:
        raise OracleLimitExceeded("oracle limit exceeded")
    return _bf(x.entries)
