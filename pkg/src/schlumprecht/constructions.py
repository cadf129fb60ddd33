"""Builders for the vector families: constant blocks, l1-averages, nested
yardsticks, yardstick averages, the 2^i (2j - 1) interleaving, and the norm
of a Schlumprecht sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

from .engine import constant_block_norm, f, norm_value
from .vectors import MAX_INDEX, SparseVector, concatenate, disjoint, successive

MAX_CONSTRUCTION_SIZE = 5_000_000


class ConstructionError(ValueError):
    pass


def _check_range(start: int, size: int) -> None:
    if start < 1:
        raise ConstructionError("start index must be >= 1")
    if size > MAX_CONSTRUCTION_SIZE:
        raise ConstructionError(f"construction needs {size} coordinates, limit is {MAX_CONSTRUCTION_SIZE}")
    if start + size - 1 > MAX_INDEX:
        raise ConstructionError("index range overflow")


def build_constant_block(length: int, start: int = 1, normalized: bool = True) -> SparseVector:
    if length < 1:
        raise ConstructionError("length must be >= 1")
    _check_range(start, length)
    c = 1.0 / constant_block_norm(length, 1.0) if normalized else 1.0
    return SparseVector(tuple((start + k, c) for k in range(length)))


# -- yardsticks -------------------------------------------------------------


@dataclass(frozen=True)
class YardstickSpec:
    n: int
    q: tuple[int, ...]
    start_index: int = 1

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(int(v) for v in self.q))
        if self.n < 1:
            raise ConstructionError("n must be >= 1")
        if len(self.q) != self.n:
            raise ConstructionError(f"need {self.n} q values, got {len(self.q)}")
        if any(v < 2 for v in self.q):
            raise ConstructionError("q values must be >= 2")
        _check_range(self.start_index, self.width)

    @property
    def p(self) -> tuple[int, ...]:
        """Level cardinalities ``p_i = q_1 ... q_i``."""
        return tuple(prod(self.q[: i + 1]) for i in range(self.n))

    @property
    def width(self) -> int:
        return sum(self.p)


def yardstick_levels(spec: YardstickSpec) -> list[int]:
    """Level (1..n) of each consecutive coordinate of the yardstick.

    Each level-i element is followed by its q_{i+1} level-(i+1) successors,
    recursively, so between consecutive elements of F_i sit q_{i+1}
    consecutive elements of F_{i+1} (together with their own descendants).
    """
    out: list[int] = []
    n, q = spec.n, spec.q
    stack = [1] * q[0]
    # explicit stack: pop a level, emit it, push its children
    stack.reverse()
    while stack:
        level = stack.pop()
        out.append(level)
        if level < n:
            stack.extend([level + 1] * q[level])
    return out


def build_yardstick(spec: YardstickSpec) -> list[SparseVector]:
    """Normalized vectors ``y_i = chi_{F_i} / ||chi_{F_i}||``, i = 1..n."""
    levels = yardstick_levels(spec)
    coeff = [1.0 / constant_block_norm(p, 1.0) for p in spec.p]
    buckets: list[list[tuple[int, float]]] = [[] for _ in range(spec.n)]
    for k, level in enumerate(levels):
        buckets[level - 1].append((spec.start_index + k, coeff[level - 1]))
    return [SparseVector(tuple(b)) for b in buckets]


def build_yardstick_average(n: int, q, m: int, start: int = 1) -> tuple[SparseVector, list[SparseVector]]:
    """Mean of ``m`` successive copies of the (n, q) yardstick.

    Returns ``(z, parts)`` where ``parts[i]`` averages the i-th yardstick
    vector over the copies and ``z = sum(parts)``.
    """
    if m < 1:
        raise ConstructionError("m must be >= 1")
    base = YardstickSpec(n, tuple(q), 1)
    _check_range(start, base.width * m)
    template = build_yardstick(base)
    parts = []
    for y in template:
        pairs = [(i + start - 1 + c * base.width, v / m) for c in range(m) for i, v in y.entries]
        parts.append(SparseVector(tuple(pairs)))
    return concatenate(parts), parts


# -- l1 averages ------------------------------------------------------------


def build_l1_average(m: int, block_length: int = 1, start: int = 1) -> SparseVector:
    """``(1/m) sum x_i`` over m consecutive normalized constant blocks."""
    if m < 2:
        raise ConstructionError("m must be >= 2")
    if block_length < 1:
        raise ConstructionError("block_length must be >= 1")
    _check_range(start, m * block_length)
    c = 1.0 / (m * constant_block_norm(block_length, 1.0))
    return SparseVector(tuple((start + k, c) for k in range(m * block_length)))


def l1_average_constants(m: int, block_length: int = 1) -> dict:
    """Measured constants of the block basis behind an l1-average.

    Reports the lower l1-ratio ``||sum x_i|| / m`` and the bound
    ``f(m)^{-1}`` that domination of the unit basis guarantees for it.
    Nothing here certifies (1 + eps/2)-equivalence to the l1^m basis.
    """
    y = build_l1_average(m, block_length)
    total = norm_value(y) * m
    return {
        "m": m,
        "block_length": block_length,
        "norm_average": total / m,
        "norm_block_sum": total,
        "l1_lower_ratio": total / m,
        "domination_bound": 1.0 / f(m),
        "l1_constant_lower_bound": m / total,
    }


# -- interleaving -----------------------------------------------------------


@dataclass(frozen=True)
class InterleaveIndex:
    m: int
    i: int
    j: int

    def __post_init__(self):
        if self.m < 1 or self.i < 0 or self.j < 1 or 2**self.i * (2 * self.j - 1) != self.m:
            raise ValueError(f"{self.m} != 2^{self.i} (2*{self.j} - 1)")


def interleave_index(m: int) -> InterleaveIndex:
    """Unique ``(i, j)`` with ``m = 2^i (2j - 1)``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    i = (m & -m).bit_length() - 1
    return InterleaveIndex(m, i, ((m >> i) + 1) // 2)


@dataclass(frozen=True)
class InterleavedBlock:
    m: int
    i: int
    j: int
    n: int
    q: tuple[int, ...]
    vectors: tuple[SparseVector, ...] = field(repr=False)

    @property
    def lo(self) -> int:
        return self.vectors[0].span().lo if self.vectors else 0

    @property
    def hi(self) -> int:
        return max(v.span().hi for v in self.vectors)


def interleave_q(n: int, occurrence: int, q_base: int = 2) -> tuple[int, ...]:
    """q-vector for the ``occurrence``-th (0-based) copy of an l_inf^n block.

    ``q_l = q_base^l`` with the first entry multiplied by ``occurrence + 1``,
    so repeated copies of the same dimension get different distributions.
    """
    q = [q_base**l for l in range(1, n + 1)]
    q[0] *= occurrence + 1
    return tuple(q)


def build_interleaved_sequence(n_seq, count: int, q_base: int = 2, start: int = 1) -> list[InterleavedBlock]:
    """Successive yardstick blocks V_1, ..., V_count.

    V_m represents l_inf^{n_j} where ``m = 2^i (2j - 1)``; the i-th repeat of
    a given j uses the i-th q-vector of :func:`interleave_q`.
    """
    n_seq = list(n_seq)
    if count < 1:
        raise ConstructionError("count must be >= 1")
    if not n_seq:
        raise ConstructionError("n_seq must be nonempty")
    if q_base < 2:
        raise ConstructionError("q_base must be >= 2")
    blocks = []
    pos = start
    for m in range(1, count + 1):
        idx = interleave_index(m)
        if idx.j > len(n_seq):
            raise ConstructionError(f"block {m} needs n_{idx.j}, but n_seq has {len(n_seq)} entries")
        n = int(n_seq[idx.j - 1])
        q = interleave_q(n, idx.i, q_base)
        spec = YardstickSpec(n, q, pos)
        blocks.append(InterleavedBlock(m, idx.i, idx.j, n, q, tuple(build_yardstick(spec))))
        pos += spec.width
    return blocks


# -- Schlumprecht sums ------------------------------------------------------


@dataclass(frozen=True)
class SumSpec:
    components: tuple[SparseVector, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not (disjoint(comps) and successive(comps)):
            raise ConstructionError("components not successive")


def sum_norm(s: SumSpec) -> float:
    """``|| sum_k ||x_k|| e_k ||`` with each ``||x_k||`` from the engine."""
    norms = [norm_value(x) for x in s.components]
    return norm_value(SparseVector.from_values(norms))
