import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from schlumprecht.vectors import (
    CanonicalForm,
    IndexInterval,
    SparseVector,
    VectorFormatError,
    canonicalize,
    lattice_leq,
    parse_vector,
    restrict,
    successive,
)

from .conftest import vec
from .strategies import vectors


def test_restrict_examples():
    x = SparseVector.from_dict({1: 1, 2: 1, 5: 1})
    assert restrict(x, IndexInterval(2, 5)) == SparseVector.from_dict({2: 1, 5: 1})
    assert restrict(x, IndexInterval(1, 5)) == x
    assert restrict(SparseVector.from_dict({3: 2}), IndexInterval(4, 9)) == SparseVector()


def test_canonicalize_examples():
    assert canonicalize(SparseVector.from_dict({3: -1, 17: 1})).values == (1.0, 1.0)
    assert canonicalize(SparseVector.from_dict({1: 2, 2: -0.5})).values == (2.0, 0.5)
    assert canonicalize(SparseVector.from_dict({5: 1, 6: 1, 9: 1})).values == (1.0, 1.0, 1.0)


def test_canonicalize_empty():
    with pytest.raises(ValueError, match="empty vector has no canonical form"):
        canonicalize(SparseVector())


def test_lattice_leq_examples():
    x = SparseVector.from_dict({1: 1, 2: 1})
    assert lattice_leq(SparseVector.from_dict({1: 0.5}), x)
    assert not lattice_leq(SparseVector.from_dict({1: 1, 3: 1}), SparseVector.from_dict({1: 1}))
    assert lattice_leq(x, x)


def test_invariants_enforced():
    with pytest.raises(ValueError):
        SparseVector(((2, 1.0), (1, 1.0)))
    with pytest.raises(ValueError):
        SparseVector(((1, 0.0),))
    with pytest.raises(ValueError):
        IndexInterval(3, 2)
    # zeros are dropped on the lenient constructor
    assert SparseVector.from_pairs([(1, 0), (2, 3)]).entries == ((2, 3.0),)


def test_rle_round_trip():
    form = CanonicalForm((0.5, 0.5, 0.5, 0.1, 0.5, 0.5))
    assert form.rle() == ((0.5, 3), (0.1, 1), (0.5, 2))
    assert CanonicalForm.from_rle_key(form.rle_key()) == form


@given(vectors(), st.data())
def test_canonical_form_ignores_signs_and_spreading(x, data):
    signs = data.draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=len(x), max_size=len(x)))
    gaps = data.draw(st.lists(st.integers(1, 5), min_size=len(x), max_size=len(x)))
    pos, pairs = 0, []
    for (_, v), s, g in zip(x.entries, signs, gaps):
        pos += g
        pairs.append((pos, s * v))
    assert canonicalize(SparseVector.from_pairs(pairs)) == canonicalize(x)


@given(vectors(universe=30), st.integers(1, 30), st.integers(0, 30), st.integers(1, 30), st.integers(0, 30))
def test_restrict_composes(x, a, la, b, lb):
    E, F = IndexInterval(a, a + la), IndexInterval(b, b + lb)
    both = E.intersect(F)
    expected = restrict(x, both) if both else SparseVector()
    assert restrict(restrict(x, E), F) == expected


@given(vectors(max_size=4, universe=6), vectors(max_size=4, universe=6), vectors(max_size=4, universe=6))
def test_lattice_leq_is_a_partial_order(x, y, z):
    assert lattice_leq(x, x)
    if lattice_leq(x, y) and lattice_leq(y, z):
        assert lattice_leq(x, z)
    if lattice_leq(x, y) and lattice_leq(y, x):
        assert canonicalize(x) == canonicalize(y) and x.support == y.support


def test_parse_text_and_json():
    assert parse_vector("1:1\n2:1\n") == vec(1, 1)
    assert parse_vector("# comment\n\n3: -0.25 \n") == SparseVector.from_dict({3: -0.25})
    assert parse_vector(json.dumps([[1, 1], [4, "2.5"]])) == SparseVector.from_dict({1: 1, 4: 2.5})
    assert parse_vector("") == SparseVector()


@pytest.mark.parametrize("bad", ["a:b", "1:x", "0:1", "1:1\n1:2", "1", "-3:1", "1:nan", "[[1]]"])
def test_parse_rejects(bad):
    with pytest.raises(VectorFormatError):
        parse_vector(bad)


def test_decimal_strings_converted_once():
    x = parse_vector("1:0.1\n2:0.2")
    assert x.values == (0.1, 0.2)
    assert parse_vector(x.to_text()) == x


def test_successive():
    assert successive([vec(1), vec(1, start=2), SparseVector(), vec(1, 1, start=5)])
    assert not successive([vec(1, 1), vec(1, start=2)])
