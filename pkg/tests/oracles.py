"""Brute-force reference implementations used only by the tests.

Nothing here imports the solver code paths it is compared against: families
are plain sets of tuples and every quantity is computed by enumeration.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product


def all_subsets(universe):
    universe = sorted(universe)
    for r in range(len(universe) + 1):
        yield from combinations(universe, r)


def schreier_sets(window):
    return {s for s in all_subsets(range(1, window + 1)) if not s or len(s) <= s[0]}


def closure(generators):
    out = {()}
    for g in generators:
        out.update(all_subsets(g))
    return out


def maximal(sets, window):
    sets = set(sets)
    return sorted(
        (s for s in sets
         if not any(tuple(sorted(s + (k,))) in sets for k in range(1, window + 1) if k not in s)),
        key=lambda s: (len(s), s))


def family_norm(x, sets):
    """max over members of sum |x|."""
    return max(sum((abs(x.get(i, 0)) for i in s), Fraction(0)) for s in sets)


def set_partitions(points, allowed):
    """Every partition of ``points`` into blocks for which ``allowed`` holds."""
    points = list(points)
    blocks = []

    def place(p):
        if p == len(points):
            yield [tuple(b) for b in blocks]
            return
        i = points[p]
        for b in blocks:
            b.append(i)
            if allowed(tuple(b)):
                yield from place(p + 1)
            b.pop()
        if allowed((i,)):
            blocks.append([i])
            yield from place(p + 1)
            blocks.pop()

    yield from place(0)


def partition_quasi_norm(x, sets):
    """min over partitions of the support into members of sum of block maxima."""
    support = sorted(i for i, v in x.items() if v)
    best = None
    for part in set_partitions(support, lambda b: b in sets):
        cost = sum((max(abs(x[i]) for i in b) for b in part), Fraction(0))
        if best is None or cost < best:
            best = cost
    return best if support else Fraction(0)


def phi_compositions(a):
    """Fewest consecutive Schreier blocks, trying every composition of ``a``."""
    a = tuple(a)
    n = len(a)
    best = None
    for cuts in product((0, 1), repeat=n - 1):
        blocks, start = [], 0
        for k, c in enumerate(cuts, start=1):
            if c:
                blocks.append(a[start:k])
                start = k
        blocks.append(a[start:])
        if all(len(b) <= b[0] for b in blocks):
            best = len(blocks) if best is None else min(best, len(blocks))
    return best


def phi_cuts(a):
    """Same quantity by recursion over the first cut position."""
    a = tuple(a)

    @lru_cache(maxsize=None)
    def rest(i):
        if i == len(a):
            return 0
        return 1 + min(rest(j) for j in range(i + 1, min(len(a), i + a[i]) + 1))

    return rest(0)


def solve_linear(rows, rhs):
    """Unique solution of a square system over the rationals, or None."""
    n = len(rows)
    m = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col] / m[col][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]


def lp_max_by_vertices(c, a_rows, b):
    """max c.x subject to A x <= b, x >= 0 (bounded, feasible), over all vertices."""
    n = len(c)
    cons = [(list(r), bi) for r, bi in zip(a_rows, b)]
    cons += [([-1 if j == k else 0 for j in range(n)], 0) for k in range(n)]
    best = None
    for active in combinations(range(len(cons)), n):
        x = solve_linear([cons[k][0] for k in active], [cons[k][1] for k in active])
        if x is None:
            continue
        if all(sum(Fraction(r[j]) * x[j] for j in range(n)) <= bi for r, bi in cons):
            val = sum(Fraction(cj) * xj for cj, xj in zip(c, x))
            best = val if best is None else max(best, val)
    return best


def random_hereditary_sets(rng, window, max_gens=6, max_size=5):
    """Sets of a random covering hereditary family on [1..window]."""
    gens = [tuple(sorted(rng.sample(range(1, window + 1), rng.randint(1, min(window, max_size)))))
            for _ in range(rng.randint(1, max_gens))]
    gens += [(i,) for i in range(1, window + 1)]
    return closure(gens)
