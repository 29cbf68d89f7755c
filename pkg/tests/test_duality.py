import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from combnorm.constructions import tree_example_vector
from combnorm.duality import (ExtremePoint, check_envelope_witness, convexity_ratio,
                              dual_norm, dual_norm_with_functional,
                              envelope_decomposition_search, envelope_gauge,
                              extreme_point_count, extreme_points, is_extreme_by_perturbation,
                              perturbation_witness, quasi_dual_functional_norm, witness_to_json)
from combnorm.family import SetFamily, partition_family, schreier, tree_family
from combnorm.norms import norm_lower, norm_upper
from combnorm.vector import SparseVector
from oracles import lp_max_by_vertices, schreier_sets

S8 = schreier(8)
values = st.fractions(min_value=-3, max_value=3, max_denominator=4)
vectors8 = st.dictionaries(st.integers(1, 8), values, max_size=6).map(SparseVector)


def dual_by_vertices(y, sets):
    """sup <x, y> over ||x||_F <= 1, solved by vertex enumeration.

    One row per inclusion-maximal trace of a member on the support; smaller
    traces give dominated rows.
    """
    support = list(y.support)
    if not support:
        return Fraction(0)
    traces = {frozenset(s) & frozenset(support) for s in sets}
    traces = [t for t in traces if t and not any(t < u for u in traces)]
    rows = [[1 if i in t else 0 for i in support] for t in traces]
    return lp_max_by_vertices([abs(y[i]) for i in support], rows, [1] * len(rows))


# extreme points --------------------------------------------------------------

def test_schreier3_has_six_extreme_points():
    pts = extreme_points(schreier(3))
    assert len(pts) == 6
    assert {p.base for p in pts} == {(1,), (2, 3)}
    same = extreme_points(partition_family([(1,), (2, 3)], 3))
    assert same == pts


def test_extreme_point_restriction():
    pts = extreme_points(schreier(4), restrict_to=[2, 4])
    assert {p.base for p in pts} == {(2,), (4,), (2, 4)}


def test_extreme_point_json():
    p = ExtremePoint((2, 3), (1, -1))
    assert ExtremePoint.from_json(p.to_json()) == p
    assert p.vector() == SparseVector({2: 1, 3: -1})
    with pytest.raises(ValueError):
        ExtremePoint((2, 3), (1,))
    with pytest.raises(ValueError):
        ExtremePoint((2,), (0,))


@pytest.mark.parametrize("w", range(1, 9))
def test_extreme_point_count(w):
    fam = schreier(w)
    assert len(extreme_points(fam)) == extreme_point_count(fam)
    assert extreme_point_count(fam) == sum(2 ** len(b) for b in fam.maximal_sets())


def test_extreme_points_have_unit_norms():
    fam = schreier(6)
    for p in extreme_points(fam):
        v = p.vector()
        assert norm_upper(v, fam) == 1
        assert envelope_gauge(v, fam)[0] == 1
        assert dual_norm(v, fam) == 1


def test_perturbation_separates_maximal_from_non_maximal():
    fam = schreier(5)
    for p in extreme_points(fam):
        assert is_extreme_by_perturbation(p.vector(), fam)
    for s in fam.sets:
        if s and s not in fam.maximal_sets():
            v = SparseVector.indicator(s)
            x = perturbation_witness(v, fam)
            assert x is not None and x.support
            assert norm_upper(v + x, fam) <= 1 and norm_upper(v - x, fam) <= 1
            assert not is_extreme_by_perturbation(v, fam)


def test_outside_ball_is_not_extreme():
    assert not is_extreme_by_perturbation(SparseVector({1: 2}), S8)


# dual norm / envelope -----------------------------------------------------------

def test_dual_norm_examples():
    single = partition_family([(i,) for i in range(1, 5)], 4)
    y = SparseVector.from_dense([1, -2, Fraction(1, 2), 3])
    assert dual_norm(y, single) == Fraction(13, 2)
    fam = partition_family([(1, 2), (3, 4)], 4)
    assert dual_norm(y, fam) == norm_upper(y, fam) == 5
    assert dual_norm(SparseVector(), fam) == 0


@settings(max_examples=150, deadline=None)
@given(st.dictionaries(st.integers(1, 8), values, max_size=5).map(SparseVector))
def test_dual_norm_matches_member_rows_oracle(y):
    assert dual_norm(y, S8) == dual_by_vertices(y, schreier_sets(8))


@settings(max_examples=150, deadline=None)
@given(vectors8)
def test_functional_attains_dual_norm(y):
    value, x = dual_norm_with_functional(y, S8)
    assert x.dot(y) == value
    assert norm_lower(x, S8) <= 1


@settings(max_examples=150, deadline=None)
@given(vectors8)
def test_strong_duality_and_witness(y):
    value, witness = envelope_gauge(y, S8)
    assert value == dual_norm(y, S8)
    check_envelope_witness(y, value, witness, S8)
    assert value <= norm_upper(y, S8)


def test_envelope_examples():
    fam = schreier(10)
    assert envelope_gauge(SparseVector.indicator((3, 4, 5)), fam)[0] == 1
    xy = SparseVector.from_dense([0, 1, 2, 1, 1])
    assert envelope_gauge(xy, fam)[0] <= 3


def test_witness_checker_rejects_bad_witnesses():
    y = SparseVector.from_dense([0, 1, 1])
    fam = schreier(3)
    value, witness = envelope_gauge(y, fam)
    with pytest.raises(ValueError):
        check_envelope_witness(y, value + 1, witness, fam)
    with pytest.raises(ValueError):
        check_envelope_witness(y, value, [(Fraction(1), ExtremePoint((2,), (1,)))], fam)
    with pytest.raises(ValueError):
        check_envelope_witness(y, Fraction(1), [(Fraction(1), ExtremePoint((2, 3), (1, -1)))], fam)
    out = witness_to_json(value, witness)
    assert out["value"] == "1/1" and out["decomposition"][0]["set"] == [2, 3]


def test_partition_families_collapse():
    rng = random.Random(4)
    for _ in range(20):
        w = rng.randint(1, 9)
        cuts = sorted(rng.sample(range(1, w), rng.randint(0, w - 1))) if w > 1 else []
        bounds = [0] + cuts + [w]
        pieces = [tuple(range(a + 1, b + 1)) for a, b in zip(bounds, bounds[1:])]
        fam = partition_family(pieces, w)
        y = SparseVector({i: Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for i in range(1, w + 1)})
        assert dual_norm(y, fam) == norm_upper(y, fam) == envelope_gauge(y, fam)[0]


# functional norm ------------------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.integers(1, 10), values, max_size=6).map(SparseVector))
def test_quasi_dual_functional_is_family_norm(y):
    assert quasi_dual_functional_norm(y, schreier(10)) == norm_lower(y, schreier(10))


def test_quasi_dual_functional_examples():
    fam = schreier(10)
    assert quasi_dual_functional_norm(SparseVector({7: 1}), fam) == 1
    y = SparseVector({4: 1, 5: -2, 9: Fraction(1, 2)})
    assert quasi_dual_functional_norm(y, fam) == Fraction(7, 2)


# decomposition search -------------------------------------------------------------

def test_search_with_one_part_is_the_quasi_norm():
    xy = SparseVector.from_dense([0, 1, 2, 1, 1])
    assert envelope_decomposition_search(xy, schreier(5), 1) == 3
    with pytest.raises(ValueError):
        envelope_decomposition_search(xy, schreier(5), 0)


@settings(max_examples=60, deadline=None)
@given(vectors8, st.integers(1, 4))
def test_search_is_sandwiched(y, parts):
    found = envelope_decomposition_search(y, S8, parts)
    assert envelope_gauge(y, S8)[0] <= found <= norm_upper(y, S8)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_search_on_tree_splits_into_branches(n):
    fam, _ = tree_family(n)
    x, branches = tree_example_vector(n)
    assert envelope_decomposition_search(x, fam, 2 ** n) <= 2 ** n
    assert dual_norm(x, fam) == 2 ** n


# convexity ratio --------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3])
def test_tree_convexity_ratio(n):
    fam, _ = tree_family(n)
    _, branches = tree_example_vector(n)
    assert convexity_ratio(branches, fam) == 1 + Fraction(n, 2)


def test_convexity_ratio_examples():
    fam = schreier(5)
    x = SparseVector.indicator((2, 3))
    y = SparseVector.indicator((3, 4, 5))
    assert convexity_ratio([x, y], fam) == Fraction(3, 2)
    assert convexity_ratio([x], fam) == 1
    with pytest.raises(ValueError):
        convexity_ratio([], fam)
    with pytest.raises(ValueError):
        convexity_ratio([SparseVector()], fam)
