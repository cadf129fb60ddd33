import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schlumprecht.constructions import (
    ConstructionError,
    InterleaveIndex,
    SumSpec,
    YardstickSpec,
    build_constant_block,
    build_interleaved_sequence,
    build_l1_average,
    build_yardstick,
    build_yardstick_average,
    interleave_index,
    l1_average_constants,
    sum_norm,
    yardstick_levels,
)
from schlumprecht.engine import f, norm_value
from schlumprecht.oracle import brute_force_norm
from schlumprecht.vectors import MAX_INDEX, SparseVector, concatenate, disjoint

from .conftest import TOL, vec

# ||y_1 + y_2|| for the (2, 2) yardstick; DP and brute force agree on all 6 coordinates
YARDSTICK_22 = 1.3916625094004955


def test_constant_block_examples():
    assert build_constant_block(1, 1, True) == vec(1)
    block = build_constant_block(2, 1, False)
    assert block == vec(1, 1)
    assert norm_value(block) == pytest.approx(1.261860, abs=1e-6)
    block = build_constant_block(4, 10, True)
    assert block.indices == (10, 11, 12, 13)
    assert block.values[0] == pytest.approx(0.580482, abs=1e-6)
    assert norm_value(block) == pytest.approx(1.0, abs=TOL)


def test_yardstick_single_level():
    (y,) = build_yardstick(YardstickSpec(1, (3,)))
    assert y.indices == (1, 2, 3)
    assert y.values == pytest.approx((2 / 3,) * 3)


def test_yardstick_layout_follows_nesting():
    assert yardstick_levels(YardstickSpec(2, (2, 2))) == [1, 2, 2, 1, 2, 2]
    y1, y2 = build_yardstick(YardstickSpec(2, (2, 2), start_index=5))
    assert y1.indices == (5, 8)
    assert y2.indices == (6, 7, 9, 10)


def _check_nesting(levels, q):
    """Between consecutive level-i elements sit exactly q_{i+1} level-(i+1) elements,
    and each level-i element precedes its own children."""
    n = len(q)
    for i in range(1, n):
        pos_i = [k for k, lv in enumerate(levels) if lv == i]
        pos_next = [k for k, lv in enumerate(levels) if lv == i + 1]
        bounds = pos_i + [len(levels)]
        for a, b in zip(bounds, bounds[1:]):
            assert sum(1 for p in pos_next if a < p < b) == q[i]
        assert pos_next[0] > pos_i[0]


@given(st.lists(st.integers(2, 4), min_size=1, max_size=3))
def test_yardstick_structure(q):
    spec = YardstickSpec(len(q), tuple(q))
    levels = yardstick_levels(spec)
    assert len(levels) == spec.width
    assert [levels.count(i + 1) for i in range(spec.n)] == list(spec.p)
    _check_nesting(levels, q)
    ys = build_yardstick(spec)
    assert disjoint(ys)
    assert concatenate(ys).indices == tuple(range(1, spec.width + 1))
    for y in ys:
        assert norm_value(y) == pytest.approx(1.0, abs=TOL)


def test_yardstick_spec_validation():
    with pytest.raises(ConstructionError):
        YardstickSpec(2, (2,))
    with pytest.raises(ConstructionError):
        YardstickSpec(1, (1,))
    with pytest.raises(ConstructionError, match="overflow"):
        YardstickSpec(1, (4,), start_index=MAX_INDEX - 1)


def test_yardstick_22_value_matches_oracle():
    ys = build_yardstick(YardstickSpec(2, (2, 2)))
    z = concatenate(ys)
    assert norm_value(z) == pytest.approx(YARDSTICK_22, abs=TOL)
    assert brute_force_norm(z) == pytest.approx(YARDSTICK_22, abs=TOL)
    # the singleton split alone already gives (f(2) + f(4)) / f(6)
    assert YARDSTICK_22 == pytest.approx((f(2) + f(4)) / f(6), abs=TOL)


def test_linf_equivalence_bracket_on_random_coefficients():
    ys = build_yardstick(YardstickSpec(2, (4, 8)))
    total = norm_value(concatenate(ys))
    rng = np.random.default_rng(0)
    for _ in range(30):
        a = rng.normal(size=2)
        combo = concatenate([y.scale(c) for y, c in zip(ys, a)])
        value = norm_value(combo)
        top = np.abs(a).max()
        assert top - TOL <= value <= top * total + TOL


def test_l1_average_examples():
    assert build_l1_average(2, 1, 1) == vec(0.5, 0.5)
    y = build_l1_average(2, 2, 1)
    assert y.indices == (1, 2, 3, 4)
    assert y.values[0] == pytest.approx(0.5 / 1.261860, abs=1e-6)
    assert y.values[0] == pytest.approx(0.396240, abs=1e-6)


def test_l1_average_constants_reported():
    c = l1_average_constants(4, 256)
    # ||sum x_i|| >= ||sum e_i|| = 4 / f(4) by domination
    assert c["norm_block_sum"] >= 4 / f(4) - TOL
    assert c["l1_lower_ratio"] >= c["domination_bound"] - TOL
    assert c["l1_constant_lower_bound"] >= 1.0


def test_yardstick_average_single_copy():
    z, parts = build_yardstick_average(2, (2, 2), 1)
    ys = build_yardstick(YardstickSpec(2, (2, 2)))
    assert parts == ys
    assert z == concatenate(ys)


def test_yardstick_average_layout_and_bounds():
    z, parts = build_yardstick_average(2, (2, 2), 2)
    assert z.indices == tuple(range(1, 13))
    assert parts[0].indices == (1, 4, 7, 10)
    for p in parts:
        value = norm_value(p)
        assert 1 / f(2) - TOL <= value <= 1 + TOL


@pytest.mark.parametrize("m", [1, 3, 4, 6])
def test_yardstick_average_part_bounds(m):
    _, parts = build_yardstick_average(2, (2, 3), m)
    for p in parts:
        assert 1 / f(m) - TOL <= norm_value(p) <= 1 + TOL


def test_interleave_index_examples():
    assert interleave_index(12) == InterleaveIndex(12, 2, 2)
    assert interleave_index(1) == InterleaveIndex(1, 0, 1)
    assert interleave_index(8) == InterleaveIndex(8, 3, 1)


def test_interleave_index_round_trip_to_a_million():
    ms = np.arange(1, 10**6 + 1, dtype=np.int64)
    i = np.zeros_like(ms)
    rest = ms.copy()
    while True:
        even = rest % 2 == 0
        if not even.any():
            break
        rest[even] //= 2
        i[even] += 1
    j = (rest + 1) // 2
    assert np.array_equal(2**i * (2 * j - 1), ms)
    for m in list(range(1, 2000)) + [999_999, 10**6, 524_288]:
        idx = interleave_index(m)
        assert (idx.i, idx.j) == (int(i[m - 1]), int(j[m - 1]))


def test_interleaved_sequence_examples():
    blocks = build_interleaved_sequence((2, 3), 2)
    assert [(b.m, b.i, b.j, b.n) for b in blocks] == [(1, 0, 1, 2), (2, 1, 1, 2)]
    assert blocks[0].q != blocks[1].q
    blocks = build_interleaved_sequence((2, 3), 4)
    assert [b.n for b in blocks] == [2, 2, 3, 2]
    for a, b in zip(blocks, blocks[1:]):
        assert a.hi < b.lo
    # same dimension, different distributions
    qs = [b.q for b in blocks if b.n == 2]
    assert len(set(qs)) == len(qs)
    for b in blocks:
        assert len(b.vectors) == b.n
        for y in b.vectors:
            assert norm_value(y) == pytest.approx(1.0, abs=TOL)


def test_interleaved_sequence_needs_enough_dimensions():
    with pytest.raises(ConstructionError):
        build_interleaved_sequence((2,), 3)


def test_sum_norm_examples():
    x = SparseVector.from_dict({1: 0.3, 2: -0.7})
    assert sum_norm(SumSpec((x,))) == pytest.approx(norm_value(x), abs=TOL)
    a = build_constant_block(2, 1)
    b = build_constant_block(3, 5)
    assert sum_norm(SumSpec((a, b))) == pytest.approx(1.261860, abs=1e-6)
    half = build_constant_block(3, 10).scale(0.5)
    assert sum_norm(SumSpec((a, half))) == pytest.approx(1.0, abs=TOL)


def test_sum_spec_rejects_overlap_and_misorder():
    with pytest.raises(ConstructionError, match="components not successive"):
        SumSpec((vec(1, 1), vec(1, start=2)))
    with pytest.raises(ConstructionError, match="components not successive"):
        SumSpec((vec(1, start=5), vec(1, start=2)))


@given(st.lists(st.lists(st.floats(0.05, 2), min_size=1, max_size=3), min_size=1, max_size=4))
def test_sum_norm_bounds(blocks):
    comps, pos = [], 1
    for vals in blocks:
        comps.append(SparseVector.from_values(vals, start=pos))
        pos += len(vals) + 1
    value = sum_norm(SumSpec(tuple(comps)))
    norms = [norm_value(c) for c in comps]
    assert max(norms) - TOL <= value <= sum(norms) + TOL
    assert value <= concatenate(comps).l1_norm() + TOL
