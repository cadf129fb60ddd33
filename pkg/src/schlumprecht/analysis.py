"""Checkers for the block-basis statements, equivalence constants, the sum
inequality and the averaging projection onto yardstick spans.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field

from .constructions import build_l1_average
from .engine import f, norm_value, split_sum
from .vectors import IndexInterval, SparseVector, concatenate, disjoint, restrict, successive

NORMALIZED_TOL = 1e-8
DEFAULT_TOL = 1e-10
LOG2_3 = math.log2(3)


class AnalysisError(ValueError):
    pass


@dataclass
class CheckItem:
    k: int
    measured: float
    bound: float
    passed: bool
    label: str = ""

    def to_dict(self) -> dict:
        out = {"k": self.k, "measured": self.measured, "bound": self.bound, "pass": self.passed}
        if self.label:
            out["label"] = self.label
        return out


@dataclass
class CheckReport:
    name: str
    items: list[CheckItem] = field(default_factory=list)
    notes: str = ""

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "items": [item.to_dict() for item in self.items],
            "notes": self.notes,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "label", "measured", "bound", "pass"])
        for item in self.items:
            writer.writerow([item.k, item.label, repr(item.measured), repr(item.bound), item.passed])
        return buf.getvalue()


def _require_normalized(vectors, what: str) -> None:
    for k, y in enumerate(vectors, 1):
        v = norm_value(y)
        if abs(v - 1.0) > NORMALIZED_TOL:
            raise AnalysisError(f"{what} {k} is not normalized (norm {v!r})")


def _require_blocks(vectors) -> None:
    if not (disjoint(vectors) and successive(vectors)):
        raise AnalysisError("blocks are not successive")


def combine(ys, coeffs) -> SparseVector:
    """``sum a_i y_i`` for disjointly supported ``y_i``."""
    pairs = [(i, a * v) for a, y in zip(coeffs, ys) if a for i, v in y.entries]
    return SparseVector.from_pairs(pairs)


def unit_combination(coeffs) -> SparseVector:
    return SparseVector.from_values(coeffs)


# -- domination -------------------------------------------------------------


def check_statement1(blocks, coeffs, tol: float = DEFAULT_TOL) -> CheckReport:
    """Normalized block bases dominate the unit basis.

    For each coefficient vector ``a`` checks
    ``||sum a_i y_i|| >= ||sum a_i e_i|| - tol`` and records the ratio.
    """
    blocks = list(blocks)
    _require_blocks(blocks)
    _require_normalized(blocks, "block")
    report = CheckReport("statement1")
    ratios = []
    for k, a in enumerate(coeffs, 1):
        a = list(a)[: len(blocks)]
        lhs = norm_value(combine(blocks, a))
        rhs = norm_value(unit_combination(a))
        ratio = lhs / rhs if rhs > 0 else 1.0
        ratios.append(ratio)
        report.items.append(CheckItem(k, ratio, 1.0, lhs >= rhs - tol))
    report.notes = f"min ratio {min(ratios, default=1.0)!r}"
    return report


# -- split sums of averages -------------------------------------------------


def check_statement2(y: SparseVector, r: int, eps: float) -> CheckReport:
    """Compare the excess ``split_sum(y, r) - ||y||`` with ``eps``."""
    total, _ = split_sum(y, r)
    excess = total - norm_value(y)
    report = CheckReport("statement2", [CheckItem(r, excess, eps, excess <= eps, "excess")])
    report.notes = f"split_sum {total!r}"
    return report


def find_n_of_eps_r(eps: float, r: int, m_grid, block_length: int = 1, start: int = 1):
    """Smallest m in ``m_grid`` whose l1-average passes :func:`check_statement2`.

    Returns ``(m_star, report)``; ``m_star`` is None when no grid point
    passes.  The search never extrapolates beyond the grid.
    """
    m_grid = list(m_grid)
    if any(b <= a for a, b in zip(m_grid, m_grid[1:])):
        raise AnalysisError("m_grid must be increasing")
    report = CheckReport("n_of_eps_r")
    m_star = None
    for m in m_grid:
        item = check_statement2(build_l1_average(m, block_length, start), r, eps).items[0]
        item.k, item.label = m, "excess"
        report.items.append(item)
        if item.passed:
            m_star = m
            break
    report.notes = f"m_star {m_star}" if m_star is not None else "not found"
    return m_star, report


# -- conditions (a) and (b) -------------------------------------------------


def log2_f_of_third(log2_r: float) -> float:
    """``log2(f(r / 3))`` for ``r = 2**log2_r``, without forming r."""
    if log2_r < 60:
        return math.log2(f(2.0**log2_r / 3.0))
    # log2(r/3 + 1) = log2 r - log2 3 + log2(1 + 3/r)
    inner = log2_r - LOG2_3 + math.log1p(3.0 * 2.0 ** (-log2_r)) / math.log(2)
    return math.log2(inner)


def min_log2_r(card: int, eps: float) -> float:
    """log2 of the least r with ``card <= eps * f(r / 3)``, i.e. ``3 (2^(card/eps) - 1)``."""
    e = card / eps
    return LOG2_3 + e + math.log1p(-(2.0 ** (-e))) / math.log(2)


@dataclass(frozen=True)
class Statement3Config:
    """Tolerances ``eps_k`` and thresholds ``r_k``, the latter stored as log2."""

    eps: tuple[float, ...]
    log2_r: tuple[float, ...]

    def __post_init__(self):
        eps = tuple(float(e) for e in self.eps)
        log2_r = tuple(float(v) for v in self.log2_r)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "log2_r", log2_r)
        if len(eps) != len(log2_r):
            raise AnalysisError("eps and r must have the same length")
        if any(e <= 0 for e in eps):
            raise AnalysisError("eps_k must be positive")
        if math.fsum(eps) > 1 + 1e-12:
            raise AnalysisError("sum of eps_k exceeds 1")
        if any(b <= a for a, b in zip(log2_r, log2_r[1:])):
            raise AnalysisError("r_k must be strictly increasing")
        if any(v < 0 for v in log2_r):
            raise AnalysisError("r_k must be >= 1")

    @classmethod
    def from_r(cls, eps, r) -> "Statement3Config":
        r = list(r)
        if any(int(v) != v or v < 1 for v in r):
            raise AnalysisError("r_k must be positive integers")
        return cls(tuple(eps), tuple(math.log2(v) for v in r))


def _effective_r(log2_r: float, card: int) -> int:
    """``min(r, card)``; split sums saturate once r reaches the support size."""
    if log2_r >= math.log2(card):
        return card
    return max(1, int(math.floor(2.0**log2_r + 1e-9)))


def check_statement3(ys, cfg: Statement3Config) -> CheckReport:
    """Check conditions (a) and (b) for each ``y_k``.

    (a) ``split_sum(y_k, r) <= 1 + eps_k`` for all ``r <= r_{k-1}``, evaluated
    exactly at ``r = min(r_{k-1}, card supp y_k)``; ``r_0 = 1``.
    (b) ``card(supp y_k) <= eps_k f(r_k / 3)``, compared in log2 form.
    """
    ys = list(ys)
    if len(ys) > len(cfg.eps):
        raise AnalysisError(f"{len(ys)} vectors but only {len(cfg.eps)} eps_k")
    _require_blocks(ys)
    _require_normalized(ys, "y")
    report = CheckReport("statement3")
    minimal = []
    for k, y in enumerate(ys, 1):
        eps = cfg.eps[k - 1]
        card = len(y)
        prev = cfg.log2_r[k - 2] if k >= 2 else 0.0
        total, _ = split_sum(y, _effective_r(prev, card))
        report.items.append(CheckItem(k, total, 1 + eps, total <= 1 + eps + DEFAULT_TOL, "a"))
        lhs = math.log2(card)
        rhs = math.log2(eps) + log2_f_of_third(cfg.log2_r[k - 1])
        report.items.append(CheckItem(k, lhs, rhs, lhs <= rhs + 1e-12, "b"))
        minimal.append(min_log2_r(card, eps))
    report.notes = "minimal log2 r_k for (b): " + ", ".join(f"{v:.6f}" for v in minimal)
    return report


# -- equivalence constants --------------------------------------------------


def linf_equiv_constant(family) -> float:
    """``||sum y_i||``: the l_inf^n equivalence constant of a disjoint normalized family.

    For disjoint normalized y_i,
    ``max |a_i| <= ||sum a_i y_i|| <= max |a_i| * ||sum y_i||``.
    """
    family = list(family)
    if not disjoint(family):
        raise AnalysisError("family supports overlap")
    _require_normalized(family, "family vector")
    return norm_value(concatenate(family))


def default_coeff_grid(n: int, max_sign_patterns: int = 1024) -> list[tuple[float, ...]]:
    """Sign patterns, unit vectors, all-ones and geometric decays (both directions)."""
    grid: list[tuple[float, ...]] = []
    for k, signs in enumerate(itertools.product((1.0, -1.0), repeat=n)):
        if k >= max_sign_patterns:
            break
        grid.append(signs)
    for j in range(n):
        grid.append(tuple(1.0 if i == j else 0.0 for i in range(n)))
    for ratio in (0.5, 0.25, 0.1):
        grid.append(tuple(ratio**i for i in range(n)))
        grid.append(tuple(ratio ** (n - 1 - i) for i in range(n)))
    return grid


@dataclass(frozen=True)
class EquivalenceBound:
    c_low: float
    witness: tuple[float, ...]
    direction: str
    grid_size: int

    def to_dict(self) -> dict:
        return {
            "c_low": self.c_low,
            "witness": list(self.witness),
            "direction": self.direction,
            "grid_size": self.grid_size,
        }


def basis_equiv_lower_bound(ys, coeff_grid=None) -> EquivalenceBound:
    """Certified lower bound on the equivalence constant of ``(y_i)`` and ``(e_i)``.

    Maximises ``max(||sum a y|| / ||sum a e||, ||sum a e|| / ||sum a y||)``
    over the default grid plus ``coeff_grid``.
    """
    ys = list(ys)
    _require_blocks(ys)
    _require_normalized(ys, "y")
    grid = default_coeff_grid(len(ys)) + [tuple(a) for a in (coeff_grid or [])]
    best = (1.0, tuple(1.0 if i == 0 else 0.0 for i in range(len(ys))), "equal")
    for a in grid:
        u = norm_value(combine(ys, a))
        v = norm_value(unit_combination(a))
        if u == 0 or v == 0:
            continue
        if u / v > best[0]:
            best = (u / v, tuple(a), "upper")
        if v / u > best[0]:
            best = (v / u, tuple(a), "lower")
    return EquivalenceBound(best[0], best[1], best[2], len(grid))


# -- sum inequality and projection ------------------------------------------


def _require_successive_intervals(intervals) -> None:
    for a, b in zip(intervals, intervals[1:]):
        if not a.hi < b.lo:
            raise AnalysisError("intervals are not successive")


def check_sum_inequality(x: SparseVector, intervals, tol: float = DEFAULT_TOL) -> CheckReport:
    """``|| sum ||E_k x|| e_k || <= || sum E_k x || <= ||x||``."""
    intervals = list(intervals)
    _require_successive_intervals(intervals)
    pieces = [restrict(x, E) for E in intervals]
    outer = norm_value(SparseVector.from_values([norm_value(p) for p in pieces]))
    middle = norm_value(concatenate(pieces))
    whole = norm_value(x)
    return CheckReport(
        "sum-inequality",
        [
            CheckItem(1, outer, middle, outer <= middle + tol, "outer<=restricted"),
            CheckItem(2, middle, whole, middle <= whole + tol, "restricted<=whole"),
        ],
    )


@dataclass(frozen=True)
class ProjectionSpec:
    """Successive intervals ``E_k``, each holding a disjoint yardstick family."""

    families: tuple[tuple[IndexInterval, tuple[SparseVector, ...]], ...]

    def __post_init__(self):
        fams = tuple((E, tuple(ys)) for E, ys in self.families)
        object.__setattr__(self, "families", fams)
        _require_successive_intervals([E for E, _ in fams])
        for E, ys in fams:
            if not disjoint(ys):
                raise AnalysisError("family supports overlap")
            for y in ys:
                if not y or any(i not in E for i in y.indices):
                    raise AnalysisError(f"family vector not contained in [{E.lo}, {E.hi}]")


def _coefficient(x: dict, y: SparseVector) -> float:
    # for a constant block y = c * chi_F this is (mean of x over F) / c
    num = sum(x.get(i, 0.0) * v for i, v in y.entries)
    return num / sum(v * v for v in y.values)


def apply_projection(spec: ProjectionSpec, x: SparseVector) -> tuple[SparseVector, dict]:
    """``Px = sum_k Q_k(E_k x)`` with ``Q_k`` the averaging projection onto ``span(y_i)``.

    ``Q_k(v) = sum_i lambda_i(v) y_i`` where ``lambda_i`` reads the average of
    ``v`` over ``supp y_i``, scaled so that ``Q_k y_i = y_i``.
    """
    if not isinstance(x, SparseVector):
        raise AnalysisError("expected a SparseVector")
    xd = x.as_dict()
    pieces = []
    per_block = []
    for k, (E, ys) in enumerate(spec.families, 1):
        lam = [_coefficient(xd, y) for y in ys]
        piece = combine(ys, lam)
        pieces.append(piece)
        per_block.append(
            {"k": k, "coefficients": lam, "norm_Ekx": norm_value(restrict(x, E)), "norm_QkEkx": norm_value(piece)}
        )
    px = concatenate(pieces)
    nx = norm_value(x)
    npx = norm_value(px)
    return px, {"norm_x": nx, "norm_Px": npx, "ratio": npx / nx if nx > 0 else 0.0, "blocks": per_block}


def projection_sum_constant(spec: ProjectionSpec) -> float:
    """Measured constant for the bound ``||Px|| <= 6 C ||x||``.

    Largest of the l_inf^n constants of the families and the lower-bound
    equivalence constant of the normalized family sums with the unit basis.
    """
    consts = [linf_equiv_constant(ys) for _, ys in spec.families]
    sums = []
    for _, ys in spec.families:
        z = concatenate(ys)
        sums.append(z.scale(1.0 / norm_value(z)))
    consts.append(basis_equiv_lower_bound(sums).c_low if sums else 1.0)
    return max(consts)
