from hypothesis import strategies as st

from schlumprecht.vectors import SparseVector

values = st.floats(min_value=0.01, max_value=10.0, allow_nan=False, allow_infinity=False)
signed = st.builds(lambda v, s: v if s else -v, values, st.booleans())


@st.composite
def vectors(draw, min_size=1, max_size=6, universe=20):
    n = draw(st.integers(min_size, max_size))
    idx = sorted(draw(st.sets(st.integers(1, universe), min_size=n, max_size=n)))
    vals = draw(st.lists(signed, min_size=n, max_size=n))
    return SparseVector.from_pairs(zip(idx, vals))


@st.composite
def vector_pairs(draw, max_size=6, universe=8):
    """Two vectors over a shared index universe."""
    a = draw(st.lists(st.one_of(st.just(0.0), signed), min_size=universe, max_size=universe))
    b = draw(st.lists(st.one_of(st.just(0.0), signed), min_size=universe, max_size=universe))
    return SparseVector.from_values(a), SparseVector.from_values(b)
