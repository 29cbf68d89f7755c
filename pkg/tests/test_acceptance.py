"""Acceptance gate: one group of tests per numbered criterion, exact equality throughout.

The terminal summary (see conftest.py) prints one PASS/FAIL line per criterion.
"""

import functools
import itertools
import random
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from combnorm.constructions import (WindowExhausted, build_l1_blocks, check_witness_properties,
                                    l1_lower_bound_holds, prefix_chain_holds, schreier_witness,
                                    tree_example_vector, unit_vector_stream,
                                    verify_growth_lower_bound, verify_stable_inequality)
from combnorm.duality import (convexity_ratio, dual_norm, envelope_gauge, extreme_point_count,
                              extreme_points, is_extreme_by_perturbation,
                              quasi_dual_functional_norm)
from combnorm.experiments import EXPERIMENTS
from combnorm.family import SetFamily, partition_family, schreier, tree_family
from combnorm.norms import norm_lower, norm_upper, phi_consecutive_schreier
from combnorm.vector import SparseVector
from oracles import all_subsets, partition_quasi_norm, phi_cuts, random_hereditary_sets


def random_rational_vector(rng, window, max_support):
    support = rng.sample(range(1, window + 1), rng.randint(0, min(window, max_support)))
    return SparseVector({i: Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for i in support})


def random_partition_family(rng, window):
    cuts = sorted(rng.sample(range(1, window), rng.randint(0, window - 1))) if window > 1 else []
    bounds = [0] + cuts + [window]
    points = list(range(1, window + 1))
    rng.shuffle(points)
    pieces = [tuple(sorted(points[a:b])) for a, b in zip(bounds, bounds[1:])]
    return partition_family(pieces, window)


# 1 ---------------------------------------------------------------------------

@pytest.mark.criterion(1)
def test_c1_triangle_inequality_fails():
    start = time.perf_counter()
    fam = schreier(10)
    x = SparseVector.from_dense([0, 1, 1])
    y = SparseVector.from_dense([0, 0, 1, 1, 1])
    assert norm_upper(x, fam) == 1
    assert norm_upper(y, fam) == 1
    assert norm_upper(x + y, fam) == 3
    assert time.perf_counter() - start < 1


# 2 ---------------------------------------------------------------------------

@pytest.mark.criterion(2)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_c2_tree_formula(n):
    start = time.perf_counter()
    fam, _ = tree_family(n)
    x, branches = tree_example_vector(n)
    assert norm_upper(x, fam) == 2 ** n * (1 + Fraction(n, 2))
    assert convexity_ratio(branches, fam) == 1 + Fraction(n, 2)
    assert time.perf_counter() - start < 60


# 3 ---------------------------------------------------------------------------

@pytest.mark.criterion(3)
def test_c3_quasi_triangle_and_disjoint_subadditivity():
    rng = random.Random(20260301)
    fam = schreier(12)
    failures = []
    disjoint_checked = 0
    for trial in range(10_000):
        x = random_rational_vector(rng, 12, 8)
        y = random_rational_vector(rng, 12, 8)
        nx, ny = norm_upper(x, fam), norm_upper(y, fam)
        if not norm_upper(x + y, fam) <= 2 * (nx + ny):
            failures.append(("quasi", trial))
        # the same pair with y cut off the support of x
        yd = SparseVector({i: v for i, v in y.items() if i not in x.support})
        disjoint_checked += 1
        if not norm_upper(x + yd, fam) <= nx + norm_upper(yd, fam):
            failures.append(("disjoint", trial))
    assert disjoint_checked == 10_000
    assert failures == []


# 4 ---------------------------------------------------------------------------

@pytest.mark.criterion(4)
def test_c4_oracle_equivalence_on_random_families():
    rng = random.Random(4)
    discrepancies = []
    for f in range(50):
        w = rng.randint(4, 10)
        sets = random_hereditary_sets(rng, w, max_gens=rng.randint(1, 8), max_size=rng.randint(2, w))
        fam = SetFamily(w, sets)
        for k in range(1, min(8, w) + 1):
            for support in itertools.combinations(range(1, w + 1), k):
                for values in ({i: 1 for i in support},
                               {i: rng.choice((1, 1, 2, 3)) for i in support}):
                    x = SparseVector(values)
                    if norm_upper(x, fam) != partition_quasi_norm(values, sets):
                        discrepancies.append((f, values))
    assert discrepancies == []


# 5 ---------------------------------------------------------------------------

@pytest.mark.criterion(5)
def test_c5_duality_identities_schreier():
    rng = random.Random(5)
    fam = schreier(10)
    for _ in range(200):
        y = random_rational_vector(rng, 10, 10)
        d = dual_norm(y, fam)
        assert d == envelope_gauge(y, fam)[0]
        assert d <= norm_upper(y, fam)
        assert quasi_dual_functional_norm(y, fam) == norm_lower(y, fam)


@pytest.mark.criterion(5)
def test_c5_duality_identities_partition_families():
    rng = random.Random(55)
    for _ in range(20):
        w = rng.randint(1, 10)
        fam = random_partition_family(rng, w)
        for _ in range(10):
            y = random_rational_vector(rng, w, w)
            d = dual_norm(y, fam)
            assert d == envelope_gauge(y, fam)[0]
            assert d == norm_upper(y, fam)
            assert quasi_dual_functional_norm(y, fam) == norm_lower(y, fam)


# 6 ---------------------------------------------------------------------------

def extreme_point_families():
    rng = random.Random(6)
    out = [(f"schreier({w})", schreier(w)) for w in range(1, 9)]
    out += [(f"partition#{w}", random_partition_family(rng, w)) for w in range(1, 9)]
    out.append(("tree(2)", tree_family(2)[0]))
    return out


@pytest.mark.criterion(6)
@pytest.mark.parametrize("name,fam", extreme_point_families(),
                         ids=[name for name, _ in extreme_point_families()])
def test_c6_extreme_points(name, fam):
    points = extreme_points(fam)
    assert len(points) == extreme_point_count(fam) == sum(2 ** len(b) for b in fam.maximal_sets())
    for p in points:
        v = p.vector()
        assert norm_upper(v, fam) == 1
        assert envelope_gauge(v, fam)[0] == 1
        assert is_extreme_by_perturbation(v, fam)
    maximal = set(fam.maximal_sets())
    for s in fam.sets:
        if s and s not in maximal:
            for signs in itertools.product((1, -1), repeat=len(s)):
                assert not is_extreme_by_perturbation(SparseVector(zip(s, signs)), fam)


# 7 ---------------------------------------------------------------------------

@pytest.mark.criterion(7)
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_c7_witness_properties(n):
    w = schreier_witness(n)
    props = check_witness_properties(w)
    for key in ("ordered_intervals", "levels_are_node_unions", "schreier_intervals_stay_short",
                "branches_are_schreier", "x_values_powers_of_two", "phi_levels"):
        assert props[key]["ok"], key
    _, report = verify_growth_lower_bound(w, 0)
    assert report["chain_holds"]


@pytest.mark.criterion(7)
def test_c7_phi_greedy_equals_brute_force():
    for a in all_subsets(range(1, 17)):
        if a:
            assert phi_consecutive_schreier(a)[0] == phi_cuts(a)


# 8 ---------------------------------------------------------------------------

FAMILY_2000 = schreier(2000)


@functools.lru_cache(maxsize=None)
def l1_blocks():
    """Blocks over schreier(2000) from unit vectors: as many as the window allows."""
    try:
        return build_l1_blocks(unit_vector_stream(), 4, FAMILY_2000, 2000), None
    except WindowExhausted as exc:
        return exc.blocks, exc.report


@pytest.mark.criterion(8)
def test_c8_at_least_four_blocks():
    blocks, report = l1_blocks()
    assert len(blocks) >= 4, f"only {len(blocks)} blocks fit in [1..2000]: {report}"


@pytest.mark.criterion(8)
def test_c8_lower_bound_on_built_blocks():
    blocks, _ = l1_blocks()
    assert len(blocks) >= 2
    rng = random.Random(8)
    for _ in range(500):
        lams = [rng.choice((-2, -1, 1, 2)) for _ in blocks]
        assert l1_lower_bound_holds(blocks, lams, FAMILY_2000)
        assert prefix_chain_holds(blocks, lams, FAMILY_2000)


@pytest.mark.criterion(8)
def test_c8_stable_inequality_on_prefix_pairs():
    blocks, _ = l1_blocks()
    for n in range(1, len(blocks)):
        prefix = SparseVector()
        for b in blocks[:n]:
            prefix = prefix + b.y
        for lam in (1, -1, 2, Fraction(1, 2)):
            assert verify_stable_inequality(prefix, blocks[n].y, lam, FAMILY_2000)


# 9 ---------------------------------------------------------------------------

@pytest.mark.criterion(9)
@pytest.mark.parametrize("name", EXPERIMENTS)
def test_c9_experiments_are_deterministic(name):
    cmd = [sys.executable, "-m", "combnorm.cli", "experiment", name, "--seed", "11"]
    first = subprocess.run(cmd, capture_output=True, timeout=600)
    second = subprocess.run(cmd, capture_output=True, timeout=600)
    assert first.returncode == second.returncode
    assert first.stdout and first.stdout == second.stdout
