"""Seeded verification suites behind ``schlumprecht check``.

Every suite is a pure function of ``(seed, tolerance, config)`` and returns a
:class:`CheckReport` whose items are ordered by index, so two runs with the
same seed serialise to identical bytes.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .analysis import (
    DEFAULT_TOL,
    CheckItem,
    CheckReport,
    ProjectionSpec,
    Statement3Config,
    apply_projection,
    check_statement1,
    check_statement3,
    check_sum_inequality,
    combine,
    linf_equiv_constant,
    min_log2_r,
    projection_sum_constant,
)
from .constructions import (
    YardstickSpec,
    build_interleaved_sequence,
    build_l1_average,
    build_yardstick,
)
from .engine import NormEngine, constant_block_formula, f, norm_value, split_sum
from .oracle import brute_force_norm
from .vectors import IndexInterval, SparseVector

SUITES = (
    "statement1",
    "statement2-trend",
    "statement3",
    "sum-inequality",
    "projection",
    "oracle-equivalence",
    "constant-block-formula",
    "split-saturation",
    "yardstick-quality",
)


class UnknownSuite(ValueError):
    pass


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def random_vector(rng, max_support: int, universe: int | None = None, signed: bool = True) -> SparseVector:
    n = int(rng.integers(1, max_support + 1))
    universe = universe or 2 * max_support
    idx = np.sort(rng.choice(np.arange(1, universe + 1), size=n, replace=False))
    vals = rng.uniform(0.01, 1.0, size=n)
    if signed:
        vals = vals * rng.choice([-1.0, 1.0], size=n)
    return SparseVector.from_pairs(zip(idx.tolist(), vals.tolist()))


def random_block_basis(rng, n_blocks: int, max_len: int = 4) -> list[SparseVector]:
    """Successive normalized blocks with random lengths, values and gaps."""
    blocks = []
    pos = int(rng.integers(1, 4))
    for _ in range(n_blocks):
        length = int(rng.integers(1, max_len + 1))
        vals = rng.uniform(0.05, 1.0, size=length) * rng.choice([-1.0, 1.0], size=length)
        b = SparseVector.from_values(vals.tolist(), start=pos)
        blocks.append(b.scale(1.0 / norm_value(b)))
        pos += length + int(rng.integers(0, 3))
    return blocks


def random_intervals(rng, universe: int, max_count: int = 4) -> list[IndexInterval]:
    count = int(rng.integers(1, max_count + 1))
    cuts = np.sort(rng.choice(np.arange(1, universe + 2), size=2 * count, replace=False))
    out = []
    for a, b in zip(cuts[0::2], cuts[1::2]):
        out.append(IndexInterval(int(a), int(b) - 1 if b - 1 >= a else int(a)))
    return out


# -- suites -----------------------------------------------------------------


def suite_statement1(seed: int, tol: float, config: dict, workers: int = 1) -> CheckReport:
    rng = np.random.default_rng(seed)
    n_bases = int(config.get("bases", 100))
    n_coeffs = int(config.get("coeffs", 10))
    cases = []
    for _ in range(n_bases):
        blocks = random_block_basis(rng, int(rng.integers(2, 5)))
        coeffs = [rng.normal(size=len(blocks)).tolist() for _ in range(n_coeffs)]
        cases.append((blocks, coeffs))
    sub = _map(lambda c: check_statement1(c[0], c[1], tol), cases, workers)
    report = CheckReport("statement1")
    for b, r in enumerate(sub):
        for item in r.items:
            report.items.append(CheckItem(b * n_coeffs + item.k, item.measured, 1.0, item.passed, f"basis{b + 1}"))
    ratios = [it.measured for it in report.items]
    report.notes = f"{n_bases} bases x {n_coeffs} coefficient vectors; min ratio {min(ratios)!r}"
    return report


def statement2_excess(m: int, r: int, block_length: int = 1) -> float:
    y = build_l1_average(m, block_length)
    return split_sum(y, r)[0] - norm_value(y)


def suite_statement2_trend(seed: int, tol: float, config: dict, workers: int = 1) -> CheckReport:
    rs = config.get("r", [2, 3])
    ms = config.get("m", [2, 4, 8, 16, 32])
    bl = int(config.get("block_length", 1))
    report = CheckReport("statement2-trend")
    k = 0
    for r in rs:
        prev = math.inf
        for m in ms:
            excess = statement2_excess(m, r, bl)
            k += 1
            report.items.append(CheckItem(k, excess, prev, excess <= prev + tol, f"r={r},m={m}"))
            prev = excess
    if bl == 1 and 2 in ms and 2 in rs:
        expected = 1 - max(0.5, 1 / f(2))
        got = statement2_excess(2, 2)
        report.items.append(CheckItem(k + 1, got, expected, abs(got - expected) <= 1e-6, "r=2,m=2 value"))
    report.notes = "excess split_sum(y, r) - ||y|| must be nonincreasing in m"
    return report


def _statement3_default() -> tuple[list[SparseVector], Statement3Config]:
    ys = [SparseVector.unit(k) for k in range(1, 9)]
    eps = [2.0**-k for k in range(1, 9)]
    log2_r = [min_log2_r(1, e) + 1.0 for e in eps]
    return ys, Statement3Config(tuple(eps), tuple(log2_r))


def statement3_from_config(config: dict) -> tuple[list[SparseVector], Statement3Config]:
    if "ys" not in config:
        return _statement3_default()
    ys = [SparseVector.from_pairs(v) for v in config["ys"]]
    if "log2_r" in config:
        cfg = Statement3Config(tuple(config["eps"]), tuple(config["log2_r"]))
    else:
        cfg = Statement3Config.from_r(config["eps"], config["r"])
    return ys, cfg


def suite_statement3(seed: int, tol: float, config: dict, workers: int = 1) -> CheckReport:
    ys, cfg = statement3_from_config(config)
    return check_statement3(ys, cfg)


def suite_sum_inequality(seed: int, tol: float, config: dict, workers: int = 1) -> CheckReport:
    rng = np.random.default_rng(seed)
    samples = int(config.get("samples", 200))
    cases = []
    for _ in range(samples):
        x = random_vector(rng, 10, universe=20)
        cases.append((x, random_intervals(rng, 22)))
    sub = _map(lambda c: check_sum_inequality(c[0], c[1], tol), cases, workers)
    report = CheckReport("sum-inequality")
    for s, r in enumerate(sub):
        for item in r.items:
            report.items.append(CheckItem(2 * s + item.k, item.measured, item.bound, item.passed, item.label))
    report.notes = f"{samples} random (x, interval family) samples"
    return report


def projection_fixture(n_seq=(2, 3), count: int = 3, gap: int = 2) -> ProjectionSpec:
    """Interleaved yardstick blocks, each wrapped in an interval with ``gap`` spare indices per side."""
    blocks = build_interleaved_sequence(n_seq, count, start=1 + gap)
    families = []
    shift = 0
    for blk in blocks:
        ys = [y.shift(shift) for y in blk.vectors]
        lo = min(y.span().lo for y in ys) - gap
        hi = max(y.span().hi for y in ys) + gap
        families.append((IndexInterval(lo, hi), tuple(ys)))
        shift += 2 * gap + 1
    return ProjectionSpec(tuple(families))


def suite_projection(seed: int, tol: float, config: dict, workers: int = 1) -> CheckReport:
    rng = np.random.default_rng(seed)
    samples = int(config.get("samples", 50))
    spec = projection_fixture()
    universe = spec.families[-1][0].hi + 2
    const = projection_sum_constant(spec)
    bound = 6.0 * const
    report = CheckReport("projection")
    worst = 0.0
    for s in range(samples):
        x = random_vector(rng, 24, universe=universe)
        px, diag = apply_projection(spec, x)
        ppx, _ = apply_projection(spec, px)
        idem = max((abs(v) for v in (ppx - px).values), default=0.0)
        # a random element of the span must be fixed
        span_el = SparseVector()
        for _, ys in spec.families:
            span_el = span_el + combine(ys, rng.normal(size=len(ys)).tolist())
        fixed, _ = apply_projection(spec, span_el)
        fix_err = max((abs(v) for v in (fixed - span_el).values), default=0.0)
        worst = max(worst, diag["ratio"])
        base = 3 * s
        report.items.append(CheckItem(base + 1, idem, 1e-8, idem <= 1e-8, "P(Px)=Px"))
        report.items.append(CheckItem(base + 2, fix_err, tol, fix_err <= tol, "P fixes span"))
        report.items.append(CheckItem(base + 3, diag["ratio"], bound, diag["ratio"] <= bound, "||Px||/||x||"))
    report.notes = f"measured sum constant {const!r}; max ||Px||/||x|| {worst!r}"
    return report


def suite_oracle_equivalence(seed: int, tol: float, config: dict, workers: int = 1) -> CheckReport:
    rng = np.random.default_rng(seed)
    samples = int(config.get("samples", 200))
    max_support = int(config.get("max_support", 5))
    xs = [random_vector(rng, max_support) for _ in range(samples)]
    engine = NormEngine(fast_path=False)

    def one(x):
        return abs(engine.norm(x).value - brute_force_norm(x))

    diffs = _map(one, xs, workers)
    report = CheckReport("oracle-equivalence")
    for k, d in enumerate(diffs, 1):
        report.items.append(CheckItem(k, d, tol, d <= tol, "|dp - brute|"))
    report.notes = f"{samples} vectors, support <= {max_support}; max deviation {max(diffs)!r}"
    return report


def suite_constant_block_formula(seed: int, tol: float, config: dict, workers: int = 1) -> CheckReport:
    limit = int(config.get("limit", 64))
    engine = NormEngine(fast_path=False)
    report = CheckReport("constant-block-formula")
    for n in range(1, limit + 1):
        ones = SparseVector.from_values([1.0] * n)
        dp = engine.norm(ones).value
        expected = constant_block_formula(n, 1.0)
        report.items.append(CheckItem(n, dp, expected, abs(dp - expected) <= tol, "dp vs n/f(n)"))
        if n <= 5:
            bf = brute_force_norm(ones)
            report.items.append(CheckItem(n, bf, expected, abs(bf - expected) <= tol, "brute vs n/f(n)"))
    report.notes = f"all-ones blocks of length 1..{limit}"
    return report


def suite_split_saturation(seed: int, tol: float, config: dict, workers: int = 1) -> CheckReport:
    rng = np.random.default_rng(seed)
    samples = int(config.get("samples", 100))
    report = CheckReport("split-saturation")
    for k in range(1, samples + 1):
        x = random_vector(rng, 12, universe=30)
        r = len(x) + int(rng.integers(0, 4))
        total, _ = split_sum(x, r)
        report.items.append(CheckItem(k, total, x.l1_norm(), abs(total - x.l1_norm()) <= tol, f"r={r}"))
    got = min_log2_r(12, 0.25)
    report.items.append(CheckItem(samples + 1, got, 49.58, abs(got - 49.58) <= 0.01, "log2 r_k, card 12, eps 1/4"))
    report.notes = "split_sum(x, r) equals the l1 norm once r >= card(supp x)"
    return report


YARDSTICK_GRID = ((2, 2), (4, 4), (4, 8), (8, 8))


def yardstick_constants(grid=YARDSTICK_GRID) -> list[float]:
    return [linf_equiv_constant(build_yardstick(YardstickSpec(len(q), q))) for q in grid]


def suite_yardstick_quality(seed: int, tol: float, config: dict, workers: int = 1) -> CheckReport:
    grid = [tuple(q) for q in config.get("grid", YARDSTICK_GRID)]
    consts = yardstick_constants(grid)
    naive = 2 / f(2)
    report = CheckReport("yardstick-quality")
    k = 0
    for q, c in zip(grid, consts):
        k += 1
        report.items.append(CheckItem(k, c, naive, 1.0 < c < naive, f"q={q} in (1, 2/f(2))"))
    for (qa, a), (qb, b) in zip(zip(grid, consts), zip(grid[1:], consts[1:])):
        k += 1
        report.items.append(CheckItem(k, b, a, b <= a, f"q={qb} <= q={qa}"))
    if (2, 2) in grid and (4, 8) in grid:
        a, b = consts[grid.index((2, 2))], consts[grid.index((4, 8))]
        k += 1
        report.items.append(CheckItem(k, b, a, 1.0 < b < a, "q=(4, 8) in (1, value at q=(2, 2))"))
    report.notes = "l_inf^2 constants: " + ", ".join(f"{q}: {c:.6f}" for q, c in zip(grid, consts))
    return report


_RUNNERS = {
    "statement1": suite_statement1,
    "statement2-trend": suite_statement2_trend,
    "statement3": suite_statement3,
    "sum-inequality": suite_sum_inequality,
    "projection": suite_projection,
    "oracle-equivalence": suite_oracle_equivalence,
    "constant-block-formula": suite_constant_block_formula,
    "split-saturation": suite_split_saturation,
    "yardstick-quality": suite_yardstick_quality,
}


def run_suite(name: str, seed: int = 0, tolerance: float = DEFAULT_TOL, config: dict | None = None, workers: int = 1) -> CheckReport:
    try:
        runner = _RUNNERS[name]
    except KeyError:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return runner(seed, tolerance, config or {}, workers)
