import math

import numpy as np
import pytest

from schlumprecht.analysis import (
    AnalysisError,
    ProjectionSpec,
    Statement3Config,
    apply_projection,
    basis_equiv_lower_bound,
    check_statement1,
    check_statement2,
    check_statement3,
    check_sum_inequality,
    combine,
    find_n_of_eps_r,
    linf_equiv_constant,
    log2_f_of_third,
    min_log2_r,
    projection_sum_constant,
)
from schlumprecht.constructions import (
    YardstickSpec,
    build_constant_block,
    build_l1_average,
    build_yardstick,
)
from schlumprecht.engine import f, norm_value, split_sum
from schlumprecht.suites import projection_fixture, random_block_basis, statement2_excess
from schlumprecht.vectors import IndexInterval, SparseVector, concatenate

from .conftest import TOL, vec

E1, E2 = SparseVector.unit(1), SparseVector.unit(2)
EXCESS_M2 = 1 - 1 / f(2)  # 0.369070...


# -- statement 1 -------------------------------------------------------------


def test_statement1_unit_blocks():
    report = check_statement1([E1, E2], [(1, 1)])
    assert report.passed
    assert report.items[0].measured == pytest.approx(1.0, abs=TOL)


def test_statement1_normalized_two_blocks():
    blocks = [build_constant_block(2, 1), build_constant_block(2, 3)]
    report = check_statement1(blocks, [(1, 1)])
    assert report.passed and report.items[0].measured >= 1 - TOL


def test_statement1_random_suite():
    rng = np.random.default_rng(21)
    for _ in range(100):
        blocks = random_block_basis(rng, int(rng.integers(2, 5)))
        coeffs = [rng.normal(size=len(blocks)) for _ in range(10)]
        report = check_statement1(blocks, coeffs)
        assert report.passed
        assert min(it.measured for it in report.items) >= 1 - TOL


def test_statement1_rejects_bad_blocks():
    with pytest.raises(AnalysisError, match="not normalized"):
        check_statement1([vec(1, 1), vec(1, start=3)], [(1, 1)])
    with pytest.raises(AnalysisError, match="not successive"):
        check_statement1([E2, E1], [(1, 1)])


# -- statement 2 -------------------------------------------------------------


def test_statement2_singleton():
    report = check_statement2(vec(1), 2, 1e-9)
    assert report.passed and report.items[0].measured == 0.0


def test_statement2_average_of_two():
    y = build_l1_average(2, 1)
    assert norm_value(y) == pytest.approx(max(0.5, 1 / f(2)), abs=TOL)
    assert norm_value(y) == pytest.approx(0.630930, abs=1e-6)
    report = check_statement2(y, 2, 1.0)
    assert report.items[0].measured == pytest.approx(EXCESS_M2, abs=TOL)
    assert EXCESS_M2 == pytest.approx(0.369070, abs=1e-6)


def test_statement2_trend_r2_nonincreasing():
    excess = [statement2_excess(m, 2) for m in (2, 4, 8, 16)]
    assert all(b <= a + TOL for a, b in zip(excess, excess[1:]))


def test_statement2_excess_values_from_brute_force_split():
    # m = 4, r = 3: best is two singletons plus a pair, 0.25 + 0.25 + 0.5 / f(2)
    y = build_l1_average(4, 1)
    assert split_sum(y, 3)[0] == pytest.approx(0.5 + 0.5 / f(2), abs=TOL)
    assert statement2_excess(4, 3) == pytest.approx(0.5 + 0.5 / f(2) - 1 / f(4), abs=TOL)


def test_find_n_of_eps_r():
    m_star, report = find_n_of_eps_r(1.0, 2, [2, 4])
    assert m_star == 2 and report.items[0].passed
    m_star, report = find_n_of_eps_r(1e-6, 2, [2, 4, 8])
    assert m_star is None and report.notes == "not found" and len(report.items) == 3
    m_star, _ = find_n_of_eps_r(0.25, 2, [2, 4, 8])
    assert m_star == 4
    with pytest.raises(AnalysisError):
        find_n_of_eps_r(1.0, 2, [4, 2])


# -- statement 3 -------------------------------------------------------------


def test_min_log2_r_inversion():
    got = min_log2_r(12, 0.25)
    assert got == pytest.approx(48 + math.log2(3), abs=1e-9)
    assert got == pytest.approx(49.58, abs=0.01)
    # at the minimal r, (b) holds with equality
    assert log2_f_of_third(got) == pytest.approx(math.log2(48), abs=1e-9)


def test_log2_f_of_third_large_and_small():
    assert log2_f_of_third(math.log2(3)) == pytest.approx(0.0, abs=1e-12)  # f(1) = 1
    assert log2_f_of_third(1000.0) == pytest.approx(math.log2(1000 - math.log2(3)), abs=1e-12)


def test_statement3_singletons_pass():
    ys = [SparseVector.unit(k) for k in range(1, 5)]
    eps = [2.0**-k for k in range(1, 5)]
    # f(r_k / 3) >= 2^k  <=>  r_k >= 3 (2^(2^k) - 1)
    r = [3 * (2 ** (2**k) - 1) for k in range(1, 5)]
    report = check_statement3(ys, Statement3Config.from_r(eps, r))
    assert report.passed
    assert [it.measured for it in report.items if it.label == "a"] == [1.0] * 4


def test_statement3_failing_condition_a():
    y1 = SparseVector.unit(1)
    y2 = build_constant_block(2, 2)
    cfg = Statement3Config((0.1, 0.1), (math.log2(2), 30.0))
    report = check_statement3([y1, y2], cfg)
    assert not report.passed
    item = [it for it in report.items if it.label == "a" and it.k == 2][0]
    assert item.measured == pytest.approx(2 / (2 / f(2)), abs=TOL)
    assert item.measured == pytest.approx(1.585, abs=1e-3)
    assert not item.passed


def test_statement3_config_validation():
    with pytest.raises(AnalysisError):
        Statement3Config((0.6, 0.6), (1.0, 2.0))
    with pytest.raises(AnalysisError):
        Statement3Config((0.1, 0.1), (2.0, 2.0))
    with pytest.raises(AnalysisError):
        Statement3Config((-0.1,), (1.0,))
    with pytest.raises(AnalysisError):
        Statement3Config.from_r((0.1,), (2.5,))


def test_split_saturation():
    rng = np.random.default_rng(2)
    for _ in range(100):
        n = int(rng.integers(1, 12))
        x = SparseVector.from_values((rng.uniform(0.01, 1, n) * rng.choice([-1, 1], n)).tolist())
        for r in (n, n + 1, n + 5):
            assert split_sum(x, r)[0] == pytest.approx(x.l1_norm(), abs=TOL)


# -- equivalence constants ---------------------------------------------------


def test_linf_equiv_constant_examples():
    assert linf_equiv_constant([E1]) == 1.0
    assert linf_equiv_constant([E1, E2]) == pytest.approx(1.261860, abs=1e-6)


def test_linf_equiv_constant_bracket():
    for q in [(2, 2), (2, 3), (3, 2), (4, 8)]:
        ys = build_yardstick(YardstickSpec(2, q))
        c = linf_equiv_constant(ys)
        assert 1 <= c <= len(ys)


def test_linf_equiv_constant_rejects_overlap():
    with pytest.raises(AnalysisError):
        linf_equiv_constant([E1, E1])


def test_basis_equiv_identical_sequences():
    ys = [SparseVector.unit(k) for k in range(1, 5)]
    bound = basis_equiv_lower_bound(ys)
    assert bound.c_low == pytest.approx(1.0, abs=TOL)


def test_basis_equiv_long_blocks():
    ys = [build_constant_block(8, 1 + 8 * k) for k in range(3)]
    bound = basis_equiv_lower_bound(ys)
    assert bound.c_low >= 1.0
    ones = (1.0, 1.0, 1.0)
    assert norm_value(combine(ys, ones)) >= norm_value(SparseVector.from_values(ones)) - TOL


# -- sum inequality and projection -------------------------------------------


def test_sum_inequality_examples():
    x = vec(1, 1)
    report = check_sum_inequality(x, [IndexInterval(1, 1), IndexInterval(2, 2)])
    assert report.passed
    assert report.items[0].measured == pytest.approx(report.items[1].bound, abs=TOL)
    report = check_sum_inequality(x, [IndexInterval(5, 6)])
    assert report.passed and report.items[0].measured == 0.0


def test_sum_inequality_random():
    rng = np.random.default_rng(8)
    for _ in range(200):
        x = SparseVector.from_values((rng.uniform(-1, 1, 12) * (rng.random(12) < 0.7)).tolist())
        cuts = np.sort(rng.choice(np.arange(1, 15), size=4, replace=False))
        intervals = [IndexInterval(int(cuts[0]), int(cuts[1]) - 1), IndexInterval(int(cuts[2]), int(cuts[3]))]
        assert check_sum_inequality(x, intervals).passed


def _spec():
    return projection_fixture()


def test_projection_identity_on_span():
    spec = _spec()
    rng = np.random.default_rng(4)
    for _ in range(10):
        x = SparseVector()
        for _, ys in spec.families:
            x = x + combine(ys, rng.normal(size=len(ys)))
        px, _ = apply_projection(spec, x)
        assert max(abs(v) for v in (px - x).values or [0.0]) <= TOL


def test_projection_outside_is_zero():
    spec = _spec()
    far = spec.families[-1][0].hi + 10
    px, diag = apply_projection(spec, SparseVector.from_dict({far: 1.0, far + 3: -2.0}))
    assert px == SparseVector() and diag["ratio"] == 0.0


def test_projection_is_idempotent_and_bounded():
    spec = _spec()
    const = projection_sum_constant(spec)
    assert const >= 1.0
    rng = np.random.default_rng(9)
    universe = spec.families[-1][0].hi
    for _ in range(20):
        idx = np.sort(rng.choice(np.arange(1, universe + 1), size=15, replace=False))
        x = SparseVector.from_pairs(zip(idx.tolist(), rng.normal(size=15).tolist()))
        px, diag = apply_projection(spec, x)
        ppx, _ = apply_projection(spec, px)
        assert max(abs(v) for v in (ppx - px).values or [0.0]) <= 1e-8
        assert diag["ratio"] <= 6 * const


def test_projection_on_constant_blocks_is_averaging():
    ys = build_yardstick(YardstickSpec(1, (4,)))
    spec = ProjectionSpec(((IndexInterval(1, 4), tuple(ys)),))
    x = vec(1, 2, 3, 6)
    px, _ = apply_projection(spec, x)
    assert px.values == pytest.approx((3.0,) * 4)


def test_projection_spec_validation():
    y = SparseVector.unit(3)
    with pytest.raises(AnalysisError):
        ProjectionSpec(((IndexInterval(1, 2), (y,)),))
    with pytest.raises(AnalysisError):
        ProjectionSpec(((IndexInterval(1, 4), (y,)), (IndexInterval(4, 6), (SparseVector.unit(5),))))
    with pytest.raises(AnalysisError):
        apply_projection(ProjectionSpec(((IndexInterval(1, 4), (y,)),)), [1, 2])


def test_report_serialisation():
    report = check_sum_inequality(vec(1, 1), [IndexInterval(1, 1), IndexInterval(2, 2)])
    data = report.to_dict()
    assert set(data) == {"name", "pass", "items", "notes"}
    assert data["pass"] is True
    csv_text = report.to_csv()
    assert csv_text.splitlines()[0] == "k,label,measured,bound,pass"
    assert len(csv_text.splitlines()) == 3
