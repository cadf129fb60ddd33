"""Exact evaluation of the Schlumprecht norm on finitely supported vectors.

The norm is the fixed point of

    ||x|| = max(||x||_inf, sup_{r >= 2, E_1 < ... < E_r} (1/f(r)) sum ||E_i x||),
    f(t) = log2(t + 1).

Because the unit basis is 1-unconditional and spreading invariant, the norm
depends only on the absolute values in support order, and the sets E_i can be
taken to be consecutive intervals tiling the support (enlarging a piece never
decreases its norm).  That turns the supremum into an interval DP:

    B(i, i) = v_i
    M(i, j, 1) = B(i, j)
    M(i, j, r) = max_{c} B(i, c) + M(c + 1, j, r - 1)
    B(i, j) = max(max_{i<=k<=j} v_k, max_{2<=r<=j-i+1} M(i, j, r) / f(r))

Every subinterval is hash-consed by its value sequence, so repeated
subranges (yardsticks, averages, constant blocks) are solved once per process.
"""

from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .vectors import CanonicalForm, IndexInterval, SparseVector, canonicalize

log = logging.getLogger(__name__)

NEG_INF = float("-inf")
FAST_PATH_LIMIT = 64
ROUNDING_MODES = ("nearest", "down", "up")


def f(t: float) -> float:
    """The growth function ``log2(t + 1)``."""
    return math.log2(t + 1)


class SupportTooLarge(ValueError):
    pass


# -- certificates -----------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    index: int

    @property
    def lo(self) -> int:
        return self.index

    @property
    def hi(self) -> int:
        return self.index

    def to_dict(self) -> dict:
        return {"type": "leaf", "lo": self.index, "hi": self.index}


@dataclass(frozen=True)
class SupLeaf:
    """A range whose norm is attained by its sup-norm."""

    lo: int
    hi: int

    def to_dict(self) -> dict:
        return {"type": "sup", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class Node:
    lo: int
    hi: int
    r: int
    children: tuple

    def to_dict(self) -> dict:
        return {
            "type": "node",
            "lo": self.lo,
            "hi": self.hi,
            "r": self.r,
            "children": [c.to_dict() for c in self.children],
        }


PartitionTree = Union[Leaf, SupLeaf, Node]


def tree_from_dict(data: dict) -> PartitionTree:
    kind = data["type"]
    if kind == "leaf":
        return Leaf(int(data["lo"]))
    if kind == "sup":
        return SupLeaf(int(data["lo"]), int(data["hi"]))
    if kind == "node":
        children = tuple(tree_from_dict(c) for c in data["children"])
        return Node(int(data["lo"]), int(data["hi"]), int(data["r"]), children)
    raise ValueError(f"unknown certificate node type {kind!r}")


def evaluate_certificate(tree: PartitionTree | None, x: SparseVector) -> float:
    """Evaluate a partition tree bottom-up on ``x``; a lower bound for ``||x||``.

    Raises ValueError if the children of a node do not tile it in order.
    """
    if tree is None:
        return 0.0
    entries = x.entries

    def _range(lo, hi):
        return [abs(v) for i, v in entries if lo <= i <= hi]

    def _eval(t) -> float:
        if isinstance(t, Leaf):
            return abs(x.get(t.index))
        if isinstance(t, SupLeaf):
            return max(_range(t.lo, t.hi), default=0.0)
        if len(t.children) != t.r or t.r < 2:
            raise ValueError("node arity does not match r")
        prev_hi = None
        for c in t.children:
            if c.lo > c.hi or (prev_hi is not None and c.lo <= prev_hi):
                raise ValueError("children are not successive")
            prev_hi = c.hi
        if t.children[0].lo < t.lo or t.children[-1].hi > t.hi:
            raise ValueError("children leave the parent range")
        return sum(_eval(c) for c in t.children) / f(t.r)

    return _eval(tree)


def tree_depth(tree: PartitionTree | None) -> int:
    if tree is None or not isinstance(tree, Node):
        return 0
    return 1 + max(tree_depth(c) for c in tree.children)


@dataclass(frozen=True)
class NormResult:
    value: float
    certificate: PartitionTree | None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }


# -- rounding ---------------------------------------------------------------


def _f_table(n: int, mode: str) -> np.ndarray:
    """``table[r] = f(r)`` for r = 0..n, widened outward in directed modes."""
    vals = np.array([math.log2(r + 1) for r in range(n + 1)], dtype=float)
    if mode == "down":
        # dividing by an over-estimate of f keeps quotients low
        vals = np.nextafter(np.nextafter(vals, np.inf), np.inf)
    elif mode == "up":
        vals = np.nextafter(np.nextafter(vals, -np.inf), -np.inf)
    return vals


class _Arith:
    """Addition and division with an optional one-ulp outward push."""

    def __init__(self, mode: str):
        if mode not in ROUNDING_MODES:
            raise ValueError(f"unknown rounding mode {mode!r}")
        self.mode = mode
        self.direction = {"nearest": 0.0, "down": -np.inf, "up": np.inf}[mode]

    def add(self, a, b):
        s = a + b
        if self.mode != "nearest":
            s = np.nextafter(s, self.direction)
        return s

    def div(self, a, b):
        q = a / b
        if self.mode != "nearest":
            q = np.nextafter(q, self.direction)
        return q


# -- solver -----------------------------------------------------------------


@dataclass
class _Solution:
    """DP tables for one canonical value sequence (0-based positions)."""

    values: np.ndarray
    ids: np.ndarray  # ids[s, j] -> interned id of the interval [s, j]
    engine: "NormEngine"
    fvals: np.ndarray = field(repr=False, default=None)

    def splits(self, s: int, j: int) -> np.ndarray:
        """``vec[r - 1] = M(s, j, r)``; ``vec[0]`` is the norm of the interval."""
        return self.engine._splits[self.ids[s, j]]

    def B(self, s: int, j: int) -> float:
        return float(self.splits(s, j)[0])

    @property
    def value(self) -> float:
        n = len(self.values)
        return self.B(0, n - 1) if n else 0.0

    def split_pieces(self, s: int, j: int, r: int) -> list[tuple[int, int]]:
        """Lexicographically first optimal tiling of [s, j] into r pieces."""
        ar = self.engine._arith
        pieces = []
        target = float(self.splits(s, j)[r - 1])
        while r > 1:
            for c in range(s, j - r + 2):
                rest = self.splits(c + 1, j)
                cand = float(ar.add(self.B(s, c), rest[r - 2]))
                if cand == target:
                    pieces.append((s, c))
                    target = float(rest[r - 2])
                    s, r = c + 1, r - 1
                    break
            else:  # pragma: no cover - tables are self-consistent
                raise RuntimeError("split reconstruction failed")
        pieces.append((s, j))
        return pieces

    def best_r(self, s: int, j: int) -> tuple[int, float]:
        """Smallest r >= 2 maximising M(s, j, r) / f(r), and that quotient."""
        vec = self.splits(s, j)
        length = j - s + 1
        quot = self.engine._arith.div(vec[1:length], self.fvals[2 : length + 1])
        k = int(np.argmax(quot))
        return k + 2, float(quot[k])

    def tree(self, s: int, j: int, index_of) -> PartitionTree:
        if s == j:
            return Leaf(index_of[s])
        top = float(self.values[s : j + 1].max())
        r, best = self.best_r(s, j)
        if top >= best:
            return SupLeaf(index_of[s], index_of[j])
        children = tuple(self.tree(a, b, index_of) for a, b in self.split_pieces(s, j, r))
        return Node(index_of[s], index_of[j], r, children)


class NormEngine:
    """Memoising evaluator for the norm and its split sums.

    ``rounding`` selects plain floating point (``"nearest"``) or one of the
    outward-rounded surrogates used for certified enclosures.  Instances are
    safe to share between threads; all cache access is serialised.
    """

    def __init__(self, rounding: str = "nearest", fast_path: bool = True, max_support: int | None = None):
        self._arith = _Arith(rounding)
        self.rounding = rounding
        self.fast_path = fast_path and rounding == "nearest"
        self.max_support = max_support
        self._lock = threading.RLock()
        self._intern: dict[tuple[float, int], int] = {}
        self._splits: list[np.ndarray] = [np.empty(0)]
        self._values: dict[str, float] = {}
        self._fvals = _f_table(1, rounding)
        self._fast_path_ok: bool | None = None
        self.stats = {"computed": 0, "reused": 0}

    # cache management

    def clear(self) -> None:
        with self._lock:
            self._intern.clear()
            del self._splits[1:]
            self._values.clear()
            self.stats = {"computed": 0, "reused": 0}

    def cached_values(self) -> dict[str, float]:
        """Whole-vector norms keyed by run-length encoded canonical form."""
        with self._lock:
            return dict(self._values)

    def preload(self, records: dict[str, float]) -> None:
        with self._lock:
            self._values.update(records)

    # core DP

    def _f(self, n: int) -> np.ndarray:
        if len(self._fvals) <= n:
            self._fvals = _f_table(max(n, 2 * len(self._fvals)), self.rounding)
        return self._fvals

    def _check_size(self, n: int) -> None:
        if self.max_support is not None and n > self.max_support:
            raise SupportTooLarge(f"support size {n} exceeds limit {self.max_support}")

    def _solve(self, values: tuple[float, ...]) -> _Solution:
        n = len(values)
        self._check_size(n)
        fvals = self._f(n)
        ar = self._arith
        vals = np.asarray(values, dtype=float)
        ids = np.zeros((n + 1, n + 1), dtype=np.int64)
        B = np.zeros((n, n))
        # rows: interval start; cols: r - 1.  Row t is the interval [t, j] for the current j.
        M = np.full((n + 1, n), NEG_INF)
        intern, store = self._intern, self._splits
        with self._lock:
            for j in range(n):
                rest_id = 0
                top = NEG_INF
                for s in range(j, -1, -1):
                    key = (values[s], rest_id)
                    iid = intern.get(key)
                    length = j - s + 1
                    top = max(top, values[s])
                    if iid is not None:
                        vec = store[iid]
                        self.stats["reused"] += 1
                    else:
                        if length == 1:
                            vec = np.array([values[s]])
                        else:
                            cand = ar.add(B[s, s:j][:, None], M[s + 1 : j + 1, 0 : length - 1])
                            multi = cand.max(axis=0)  # M(s, j, r) for r = 2..length
                            best = ar.div(multi, fvals[2 : length + 1]).max()
                            vec = np.empty(length)
                            vec[0] = max(top, float(best))
                            vec[1:] = multi
                        iid = len(store)
                        store.append(vec)
                        intern[key] = iid
                        self.stats["computed"] += 1
                    ids[s, j] = iid
                    B[s, j] = vec[0]
                    M[s, :length] = vec
                    rest_id = iid
        return _Solution(vals, ids, self, fvals)

    # fast path for constant blocks

    def fast_path_validated(self) -> bool:
        """Check ``||c * 1_n|| = c n / f(n)`` against the DP for all n <= 64, once."""
        if self._fast_path_ok is None:
            with self._lock:
                if self._fast_path_ok is None:
                    ok = all(
                        abs(self._solve((1.0,) * n).value - constant_block_formula(n, 1.0)) <= 1e-10
                        for n in range(1, FAST_PATH_LIMIT + 1)
                    )
                    if not ok:
                        log.warning("constant-block formula failed validation; fast path disabled")
                    self._fast_path_ok = ok
        return self._fast_path_ok

    def _use_fast_path(self, form: CanonicalForm) -> bool:
        return self.fast_path and len(form.rle()) == 1 and self.fast_path_validated()

    # public API

    def norm(self, x: SparseVector) -> NormResult:
        if not x:
            return NormResult(0.0, None)
        form = canonicalize(x)
        idx = x.indices
        if self._use_fast_path(form):
            n, c = len(form), form.values[0]
            value = constant_block_formula(n, c)
            if n == 1:
                cert = Leaf(idx[0])
            else:
                cert = Node(idx[0], idx[-1], n, tuple(Leaf(i) for i in idx))
            return NormResult(value, cert)
        sol = self._solve(form.values)
        value = sol.value
        with self._lock:
            self._values[form.rle_key()] = value
        return NormResult(value, sol.tree(0, len(form) - 1, idx))

    def norm_value(self, x: SparseVector) -> float:
        """Norm without a certificate; served from the whole-vector cache when possible."""
        if not x:
            return 0.0
        form = canonicalize(x)
        if self._use_fast_path(form):
            return constant_block_formula(len(form), form.values[0])
        key = form.rle_key()
        with self._lock:
            hit = self._values.get(key)
        if hit is not None:
            return hit
        value = self._solve(form.values).value
        with self._lock:
            self._values[key] = value
        return value

    def split_sum(self, x: SparseVector, r: int) -> tuple[float, list[IndexInterval]]:
        """Max of ``sum ||E_i x||`` over at most ``r`` successive pieces (no 1/f(r) factor)."""
        if r < 1:
            raise ValueError("r must be >= 1")
        if not x:
            return 0.0, []
        form = canonicalize(x)
        idx = x.indices
        n = len(form)
        sol = self._solve(form.values)
        vec = sol.splits(0, n - 1)
        top = min(r, n)
        k = int(np.argmax(vec[:top]))
        pieces = sol.split_pieces(0, n - 1, k + 1)
        return float(vec[k]), [IndexInterval(idx[a], idx[b]) for a, b in pieces]

    def split_profile(self, x: SparseVector) -> np.ndarray:
        """``profile[r - 1]`` = best sum over exactly r pieces, r = 1..card(supp x)."""
        if not x:
            return np.zeros(0)
        form = canonicalize(x)
        sol = self._solve(form.values)
        return sol.splits(0, len(form) - 1).copy()


def constant_block_formula(n: int, c: float) -> float:
    """``c * n / f(n)`` for n >= 2 and ``c`` for n = 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    c = abs(c)
    return c if n == 1 else c * n / f(n)


# -- level truncations ------------------------------------------------------


def level_norm(x: SparseVector, t: int) -> float:
    """t-fold truncation of the norm recursion, starting from the sup-norm.

    Level 0 is ``||x||_inf``; level t + 1 applies one splitting step to level t.
    Nondecreasing in t and equal to the norm once t >= card(supp x) - 1.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if not x:
        return 0.0
    v = np.array(canonicalize(x).values)
    n = len(v)
    fvals = _f_table(n, "nearest")
    top = np.full((n, n), NEG_INF)
    for s in range(n):
        top[s, s:] = np.maximum.accumulate(v[s:])
    B = top.copy()
    for _ in range(t):
        new = top.copy()
        for j in range(n):
            M = np.full((n + 1, n), NEG_INF)
            for s in range(j, -1, -1):
                length = j - s + 1
                M[s, 0] = B[s, j]
                if length > 1:
                    cand = B[s, s:j][:, None] + M[s + 1 : j + 1, 0 : length - 1]
                    multi = cand.max(axis=0)
                    M[s, 1:length] = multi
                    new[s, j] = max(top[s, j], float((multi / fvals[2 : length + 1]).max()))
        if np.array_equal(new, B):
            break
        B = new
    return float(B[0, n - 1])


# -- module level default engine --------------------------------------------

_default = NormEngine()


def default_engine() -> NormEngine:
    return _default


def norm(x: SparseVector) -> NormResult:
    return _default.norm(x)


def norm_value(x: SparseVector) -> float:
    return _default.norm_value(x)


def split_sum(x: SparseVector, r: int) -> tuple[float, list[IndexInterval]]:
    return _default.split_sum(x, r)


def constant_block_norm(n: int, c: float) -> float:
    """Norm of ``c`` times the all-ones block of length n.

    Uses the closed form only after it has been checked against the DP for
    every n <= 64; otherwise falls back to the DP.
    """
    if n < 1 or c < 0:
        raise ValueError("need n >= 1 and c >= 0")
    if c == 0:
        return 0.0
    if _default.fast_path and _default.fast_path_validated():
        return constant_block_formula(n, c)
    return _default.norm_value(SparseVector.from_values([c] * n))


def certified_norm(x: SparseVector) -> tuple[float, float]:
    """Enclosure ``[lower, upper]`` from outward-rounded runs of the DP."""
    lo = _certified_engines["down"].norm_value(x)
    hi = _certified_engines["up"].norm_value(x)
    return lo, hi


_certified_engines = {"down": NormEngine("down"), "up": NormEngine("up")}
