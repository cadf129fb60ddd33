"""Finitely supported vectors, index intervals and canonical forms.

A vector ``x = sum a_i e_i`` is stored as a tuple of ``(index, value)`` pairs,
sorted by index, with zero coefficients dropped.  Indices are 1-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

MAX_INDEX = 2**31 - 1

Number = Union[int, float, str]


class VectorFormatError(ValueError):
    """Raised when vector text cannot be parsed."""


def _to_float(value: Number) -> float:
    if isinstance(value, str):
        value = value.strip()
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise VectorFormatError(f"not a number: {value!r}") from None
    if out != out or out in (float("inf"), float("-inf")):
        raise VectorFormatError(f"non-finite value: {value!r}")
    return out


def _to_index(index) -> int:
    if isinstance(index, bool):
        raise VectorFormatError(f"bad index: {index!r}")
    if isinstance(index, str):
        index = index.strip()
        if not index.isdigit():
            raise VectorFormatError(f"bad index: {index!r}")
        index = int(index)
    if isinstance(index, float):
        if not index.is_integer():
            raise VectorFormatError(f"bad index: {index!r}")
        index = int(index)
    if not isinstance(index, int) or not 1 <= index <= MAX_INDEX:
        raise VectorFormatError(f"index out of range: {index!r}")
    return index


@dataclass(frozen=True)
class IndexInterval:
    lo: int
    hi: int

    def __post_init__(self):
        if not (1 <= self.lo <= self.hi <= MAX_INDEX):
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    def __contains__(self, index: int) -> bool:
        return self.lo <= index <= self.hi

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def intersect(self, other: "IndexInterval") -> "IndexInterval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return IndexInterval(lo, hi) if lo <= hi else None

    def to_list(self) -> list[int]:
        return [self.lo, self.hi]


@dataclass(frozen=True)
class CanonicalForm:
    """Absolute values of a vector in support order.

    Sign and gap information are gone, so equal forms mean equal norms.
    """

    values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.values)

    def rle(self) -> tuple[tuple[float, int], ...]:
        """Run-length encoding ``((value, count), ...)``."""
        runs: list[list] = []
        for v in self.values:
            if runs and runs[-1][0] == v:
                runs[-1][1] += 1
            else:
                runs.append([v, 1])
        return tuple((v, c) for v, c in runs)

    def rle_key(self) -> str:
        """Stable string key; floats written with ``repr`` so they round-trip."""
        return ";".join(f"{v!r}*{c}" for v, c in self.rle())

    @classmethod
    def from_rle_key(cls, key: str) -> "CanonicalForm":
        values: list[float] = []
        if key:
            for part in key.split(";"):
                v, c = part.rsplit("*", 1)
                values.extend([float(v)] * int(c))
        return cls(tuple(values))


@dataclass(frozen=True)
class SparseVector:
    entries: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        prev = 0
        for i, v in self.entries:
            if i <= prev:
                raise ValueError("indices must be strictly increasing")
            if v == 0:
                raise ValueError("zero values must not be stored")
            prev = i
        if prev > MAX_INDEX:
            raise ValueError("index out of range")

    @classmethod
    def from_pairs(cls, pairs: Iterable) -> "SparseVector":
        """Build from ``(index, value)`` pairs in any order; zeros are dropped."""
        seen: dict[int, float] = {}
        for pair in pairs:
            try:
                i, v = pair
            except (TypeError, ValueError):
                raise VectorFormatError(f"expected [index, value], got {pair!r}") from None
            i = _to_index(i)
            if i in seen:
                raise VectorFormatError(f"duplicate index {i}")
            seen[i] = _to_float(v)
        return cls(tuple((i, seen[i]) for i in sorted(seen) if seen[i] != 0.0))

    @classmethod
    def from_dict(cls, mapping: Mapping[int, Number]) -> "SparseVector":
        return cls.from_pairs(mapping.items())

    @classmethod
    def from_values(cls, values: Iterable[Number], start: int = 1) -> "SparseVector":
        """Consecutive coefficients starting at ``start``."""
        return cls.from_pairs((start + k, v) for k, v in enumerate(values))

    @classmethod
    def unit(cls, index: int) -> "SparseVector":
        return cls(((index, 1.0),))

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.entries)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.entries)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.indices)

    def get(self, index: int, default: float = 0.0) -> float:
        for i, v in self.entries:
            if i == index:
                return v
        return default

    def as_dict(self) -> dict[int, float]:
        return dict(self.entries)

    def span(self) -> IndexInterval | None:
        if not self.entries:
            return None
        return IndexInterval(self.entries[0][0], self.entries[-1][0])

    def sup_norm(self) -> float:
        return max((abs(v) for v in self.values), default=0.0)

    def l1_norm(self) -> float:
        return sum(abs(v) for v in self.values)

    def scale(self, c: float) -> "SparseVector":
        if c == 0:
            return SparseVector()
        return SparseVector.from_pairs((i, c * v) for i, v in self.entries)

    def __mul__(self, c: float) -> "SparseVector":
        return self.scale(c)

    __rmul__ = __mul__

    def __neg__(self) -> "SparseVector":
        return self.scale(-1.0)

    def __add__(self, other: "SparseVector") -> "SparseVector":
        acc = self.as_dict()
        for i, v in other.entries:
            acc[i] = acc.get(i, 0.0) + v
        return SparseVector.from_pairs(acc.items())

    def __sub__(self, other: "SparseVector") -> "SparseVector":
        return self + (-other)

    def shift(self, offset: int) -> "SparseVector":
        return SparseVector(tuple((i + offset, v) for i, v in self.entries))

    def is_before(self, other: "SparseVector") -> bool:
        """``supp self < supp other``; true when either is empty."""
        if not self.entries or not other.entries:
            return True
        return self.entries[-1][0] < other.entries[0][0]

    def to_pairs(self) -> list[list]:
        return [[i, v] for i, v in self.entries]

    def to_text(self) -> str:
        return "".join(f"{i}:{v!r}\n" for i, v in self.entries)


def restrict(x: SparseVector, E: IndexInterval) -> SparseVector:
    """The restriction ``Ex``: entries with ``lo <= index <= hi``."""
    return SparseVector(tuple((i, v) for i, v in x.entries if E.lo <= i <= E.hi))


def canonicalize(x: SparseVector) -> CanonicalForm:
    if not x.entries:
        raise ValueError("empty vector has no canonical form")
    return CanonicalForm(tuple(abs(v) for _, v in x.entries))


def lattice_leq(y: SparseVector, x: SparseVector) -> bool:
    """True iff ``|y_i| <= |x_i|`` for every index."""
    xd = x.as_dict()
    return all(abs(v) <= abs(xd.get(i, 0.0)) for i, v in y.entries)


def successive(vectors: Iterable[SparseVector]) -> bool:
    """True iff the nonempty supports are pairwise ordered ``supp x_1 < supp x_2 < ...``."""
    last = 0
    for vec in vectors:
        if not vec:
            continue
        if vec.entries[0][0] <= last:
            return False
        last = vec.entries[-1][0]
    return True


def disjoint(vectors: Iterable[SparseVector]) -> bool:
    seen: set[int] = set()
    for vec in vectors:
        s = vec.support
        if seen & s:
            return False
        seen |= s
    return True


def concatenate(vectors: Iterable[SparseVector]) -> SparseVector:
    """Sum of disjointly supported vectors."""
    pairs = [p for vec in vectors for p in vec.entries]
    return SparseVector.from_pairs(pairs)


def parse_vector(text: str) -> SparseVector:
    """Parse ``index:value`` lines or a JSON array of ``[index, value]`` pairs.

    Blank lines and ``#`` comments are ignored; an empty input is the zero vector.
    """
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise VectorFormatError(f"invalid JSON: {exc}") from None
        if not isinstance(data, list):
            raise VectorFormatError("JSON vector must be an array of [index, value] pairs")
        return SparseVector.from_pairs(data)
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.count(":") != 1:
            raise VectorFormatError(f"line {lineno}: expected 'index:value', got {line!r}")
        idx, val = line.split(":")
        try:
            pairs.append((_to_index(idx), _to_float(val)))
        except VectorFormatError as exc:
            raise VectorFormatError(f"line {lineno}: {exc}") from None
    return SparseVector.from_pairs(pairs)


def format_vector(x: SparseVector, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(x.to_pairs())
    return x.to_text()
