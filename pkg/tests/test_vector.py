from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from combnorm.vector import SparseVector, as_fraction, fmt_q, vector_sum

entries = st.dictionaries(st.integers(1, 20), st.fractions(max_denominator=6), max_size=8)


def test_zero_entries_are_dropped():
    v = SparseVector({1: 0, 2: "1/2", 5: 3})
    assert v.support == (2, 5)
    assert v[1] == 0 and v[2] == Fraction(1, 2)


def test_indices_start_at_one():
    with pytest.raises(ValueError):
        SparseVector({0: 1})


def test_floats_rejected():
    with pytest.raises(TypeError):
        as_fraction(0.5)
    with pytest.raises(TypeError):
        SparseVector({1: 0.5})


def test_fmt_q_always_has_denominator():
    assert fmt_q(3) == "3/1"
    assert fmt_q(Fraction(-2, 4)) == "-1/2"
    assert fmt_q(0) == "0/1"


def test_from_dense():
    v = SparseVector.from_dense([0, 1, 2, 1, 1])
    assert dict(v.items()) == {2: 1, 3: 2, 4: 1, 5: 1}


def test_arithmetic():
    x = SparseVector({2: 1, 3: 1})
    y = SparseVector({3: 1, 4: 1})
    assert x + y == SparseVector({2: 1, 3: 2, 4: 1})
    assert x - x == SparseVector()
    assert (x * Fraction(1, 2))[2] == Fraction(1, 2)
    assert 2 * x == x + x
    assert (x / 4)[3] == Fraction(1, 4)
    assert abs(-x) == x
    assert x.dot(y) == 1
    assert x.restrict([3]) == SparseVector({3: 1})
    assert vector_sum([x, y, -x]) == y


@given(entries)
def test_json_round_trip(data):
    v = SparseVector(data)
    assert SparseVector.from_json(v.to_json()) == v
    assert all("/" in s for s in v.to_json()["entries"].values())


@given(entries, entries)
def test_addition_commutes(a, b):
    assert SparseVector(a) + SparseVector(b) == SparseVector(b) + SparseVector(a)


def test_hash_matches_equality():
    assert hash(SparseVector({1: 1, 2: 0})) == hash(SparseVector({1: 1}))
