"""Witness constructions: the dyadic tree vector, the Schreier witness
system with its certificate-counting check, the stable-vector inequality,
the l1 block builder and the Schur-failure report.

Schreier witness sets grow doubly exponentially (about 2.3e16 at N = 4), so
they are handled as unions of closed integer intervals, never element by
element.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .family import (DyadicNode, SetFamily, index_set, is_large_proxy, tree_family,
                     tree_nodes)
from .norms import is_k_stable, norm_lower, norm_upper, sup_norm
from .vector import SparseVector, fmt_q, vector_sum

Interval = tuple  # (lo, hi), inclusive


class IntervalSet:
    """A finite set of positive integers stored as disjoint sorted runs."""

    __slots__ = ("runs",)

    def __init__(self, runs: Iterable[Sequence[int]] = ()):
        cleaned = sorted((int(lo), int(hi)) for lo, hi in runs if lo <= hi)
        merged: list[list[int]] = []
        for lo, hi in cleaned:
            if lo < 1:
                raise ValueError("indices start at 1")
            if merged and lo <= merged[-1][1] + 1:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        self.runs = tuple((lo, hi) for lo, hi in merged)

    @classmethod
    def of(cls, elements: Iterable[int]) -> "IntervalSet":
        return cls((i, i) for i in elements)

    @property
    def size(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.runs)

    def __bool__(self) -> bool:
        return bool(self.runs)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalSet) and self.runs == other.runs

    def __hash__(self):
        return hash(self.runs)

    def __repr__(self) -> str:
        return f"IntervalSet({list(self.runs)})"

    @property
    def min(self) -> int:
        return self.runs[0][0]

    @property
    def max(self) -> int:
        return self.runs[-1][1]

    def __contains__(self, i: int) -> bool:
        return any(lo <= i <= hi for lo, hi in self.runs)

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.runs + other.runs)

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        a, b = self.runs, other.runs
        i = j = 0
        while i < len(a) and j < len(b):
            lo, hi = max(a[i][0], b[j][0]), min(a[i][1], b[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(out)

    def elements(self) -> Iterator[int]:
        for lo, hi in self.runs:
            yield from range(lo, hi + 1)

    def to_tuple(self) -> tuple:
        return tuple(self.elements())

    def is_schreier(self) -> bool:
        return not self.runs or self.size <= self.min

    def to_json(self) -> list:
        return [[lo, hi] for lo, hi in self.runs]


def union_all(sets: Iterable[IntervalSet]) -> IntervalSet:
    runs: list = []
    for s in sets:
        runs.extend(s.runs)
    return IntervalSet(runs)


def phi_intervals(a: IntervalSet) -> tuple[int, list[IntervalSet]]:
    """Greedy consecutive Schreier blocks of an interval set.

    Each block starts at the least remaining element ``m`` and takes the next
    ``m`` elements, so it runs in time proportional to the block count.
    """
    runs = a.runs
    if not runs:
        raise ValueError("phi needs a nonempty set")
    blocks = []
    r, cur = 0, runs[0][0]
    while r < len(runs):
        need = cur  # block of size min(block)
        pieces = []
        while need and r < len(runs):
            hi = runs[r][1]
            take = min(need, hi - cur + 1)
            pieces.append((cur, cur + take - 1))
            need -= take
            if cur + take - 1 == hi:
                r += 1
                if r < len(runs):
                    cur = runs[r][0]
            else:
                cur += take
        blocks.append(IntervalSet(pieces))
    return len(blocks), blocks


# dyadic tree vector ---------------------------------------------------

def tree_example_vector(n: int) -> tuple[SparseVector, list[SparseVector]]:
    """Sum of the branch indicators of ``tree_family(n)`` and the branches."""
    _, index = tree_family(n)
    leaves = [s for s in tree_nodes(n) if len(s) == n]
    branches = [SparseVector.indicator(index[leaf[:k]] for k in range(n + 1)) for leaf in leaves]
    return vector_sum(branches), branches


# Schreier witness system ----------------------------------------------

def reverse_lex_order(n: int) -> list[DyadicNode]:
    """Nodes of ``{0,1}^{<=n}`` ascending in reverse lexicographic order.

    A proper prefix comes after its extensions and, at the first differing
    bit, 1 comes before 0; so the all-ones leaf is first and the root last.
    """
    out: list[DyadicNode] = []

    def visit(s: DyadicNode):
        if len(s) < n:
            visit(s + (1,))
            visit(s + (0,))
        out.append(s)

    visit(())
    return out


def node_label(s: DyadicNode) -> str:
    return "".join(map(str, s))


@dataclass
class SchreierWitness:
    n: int
    order: list  # nodes ascending
    intervals: dict  # node -> (lo, hi)
    sets: list  # branch unions, one IntervalSet per leaf (leaves in order)
    x_runs: list  # (lo, hi, value): x is constant on each run
    levels: dict  # r -> IntervalSet where x == 2^r

    def node_set(self, s: DyadicNode) -> IntervalSet:
        return IntervalSet([self.intervals[s]])

    def level_nodes(self, r: int) -> list[DyadicNode]:
        """``L_r``: nodes of length ``n - r`` in ascending order."""
        return [s for s in self.order if len(s) == self.n - r]

    @property
    def support(self) -> IntervalSet:
        return IntervalSet((lo, hi) for lo, hi, _ in self.x_runs)

    def vector(self, limit: int = 100_000) -> SparseVector:
        """``x`` as a sparse vector; only for small ``n``."""
        if self.support.size > limit:
            raise ValueError(f"support has {self.support.size} points, over the limit {limit}")
        return SparseVector((i, v) for lo, hi, v in self.x_runs for i in range(lo, hi + 1))

    def x_value(self, i: int) -> int:
        for lo, hi, v in self.x_runs:
            if lo <= i <= hi:
                return v
        return 0

    def properties(self) -> dict:
        return check_witness_properties(self)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "nodes": [{"node": node_label(s), "interval": list(self.intervals[s])} for s in self.order],
            "sets": [s.to_json() for s in self.sets],
            "x": [[lo, hi, fmt_q(v)] for lo, hi, v in self.x_runs],
            "levels": {str(r): a.to_json() for r, a in sorted(self.levels.items())},
            "properties": self.properties(),
        }


def _coverage_runs(sets: Sequence[IntervalSet]) -> list:
    """Runs of constant multiplicity of the union of ``sets`` (multiplicity > 0)."""
    events: dict[int, int] = {}
    for s in sets:
        for lo, hi in s.runs:
            events[lo] = events.get(lo, 0) + 1
            events[hi + 1] = events.get(hi + 1, 0) - 1
    runs = []
    depth, prev = 0, None
    for p in sorted(events):
        if depth and prev is not None:
            if runs and runs[-1][1] == prev - 1 and runs[-1][2] == depth:
                runs[-1] = (runs[-1][0], p - 1, depth)
            else:
                runs.append((prev, p - 1, depth))
        depth += events[p]
        prev = p
    return runs


def schreier_witness(n: int) -> SchreierWitness:
    """Attach intervals to tree nodes in ascending order, with each start at
    its least admissible value, and sum the branch indicators."""
    if n < 1:
        raise ValueError("N must be >= 1")
    order = reverse_lex_order(n)
    intervals: dict = {}
    prev_max = None
    for s in order:
        if prev_max is None:
            lo, hi = n + 1, n + 1
        elif len(s) == n:
            lo = (2 * n + 1) * prev_max
            hi = lo + 2 * prev_max - 1
        elif s:
            t_lo, t_hi = intervals[s + (1,) * (n - len(s))]
            lo = prev_max + 1
            hi = lo + (t_hi - t_lo)
        else:
            lo = hi = prev_max + 1
        intervals[s] = (lo, hi)
        prev_max = hi
    leaves = [s for s in order if len(s) == n]
    sets = [IntervalSet([intervals[leaf[:k]] for k in range(n + 1)]) for leaf in leaves]
    x_runs = _coverage_runs(sets)
    levels = {}
    for r in range(n + 1):
        levels[r] = IntervalSet((lo, hi) for lo, hi, v in x_runs if v == 2 ** r)
    return SchreierWitness(n, order, intervals, sets, x_runs, levels)


def _property3_failures(w: SchreierWitness, r: int) -> list:
    """Pairs ``(s1, s2)`` of consecutive ``L_r`` nodes where a Schreier interval
    of ``A_r`` meeting ``F_{s1}`` reaches ``max F_{s2}``.

    The longest Schreier interval of ``A_r`` that meets ``F_{s1}`` starts at
    ``max F_{s1}`` (a later start means a larger cardinality bound), so that
    single case decides the property for the pair.
    """
    nodes = w.level_nodes(r)
    a = w.levels[r]
    bad = []
    for s1, s2 in zip(nodes, nodes[1:]):
        start = w.intervals[s1][1]
        tail = a & IntervalSet([(start, a.max)])
        # the start-th element of A_r counted from max F_{s1}, or the end of A_r
        reach = _nth(tail, start) or a.max
        if reach >= w.intervals[s2][1]:
            bad.append((node_label(s1), node_label(s2)))
    return bad


def _nth(a: IntervalSet, k: int) -> int | None:
    """The ``k``-th smallest element (1-based), or ``None`` if ``|a| < k``."""
    for lo, hi in a.runs:
        if k <= hi - lo + 1:
            return lo + k - 1
        k -= hi - lo + 1
    return None


def check_witness_properties(w: SchreierWitness) -> dict:
    """Evaluate each claimed property; every entry carries ``ok`` plus details."""
    n = w.n
    out = {}
    ivs = [w.intervals[s] for s in w.order]
    out["ordered_intervals"] = {
        "ok": all(a[1] < b[0] for a, b in zip(ivs, ivs[1:])),
    }
    expected = {r: union_all(w.node_set(s) for s in w.level_nodes(r)) for r in range(n + 1)}
    out["levels_are_node_unions"] = {
        "ok": all(w.levels[r] == expected[r] for r in range(n + 1)),
    }
    bad3 = {r: _property3_failures(w, r) for r in range(n)}
    out["schreier_intervals_stay_short"] = {
        "ok": not any(bad3.values()),
        "failures": {str(r): v for r, v in bad3.items() if v},
    }
    sizes = [(s.size, s.min) for s in w.sets]
    out["branches_are_schreier"] = {
        "ok": all(size <= lo for size, lo in sizes),
    }
    values = sorted({v for _, _, v in w.x_runs})
    out["x_values_powers_of_two"] = {
        "ok": set(values) <= {2 ** r for r in range(n + 1)},
        "values": values,
    }
    phis = {r: phi_intervals(w.levels[r])[0] for r in range(n + 1) if w.levels[r]}
    out["phi_levels"] = {
        "ok": len(phis) == n + 1 and all(phis[r] >= 2 ** (n - r) for r in phis),
        "phi": {str(r): p for r, p in phis.items()},
        "required": {str(r): 2 ** (n - r) for r in range(n + 1)},
    }
    return out


class CertificateError(ValueError):
    """A partition certificate that is not a partition into Schreier sets."""


def branch_partition(w: SchreierWitness) -> list[IntervalSet]:
    """Each node goes to the branch of its least terminal descendant; the
    pieces are disjoint and each lies inside one branch union."""
    n = w.n
    groups: dict = {}
    for s in w.order:
        groups.setdefault(s + (1,) * (n - len(s)), []).append(w.intervals[s])
    leaves = [s for s in w.order if len(s) == n]
    return [IntervalSet(groups[leaf]) for leaf in leaves]


def _as_interval_set(piece) -> IntervalSet:
    if isinstance(piece, IntervalSet):
        return piece
    return IntervalSet.of(index_set(piece))


def verify_growth_lower_bound(w: SchreierWitness, m: int, certificate=None) -> tuple[bool, dict]:
    """Certificate counting for ``x_N`` against the hypothesis ``||x_N|| <= 2^{M+N}``.

    ``certificate`` is a list of pieces (interval sets or index lists) that
    must be Schreier sets, pairwise disjoint and covering ``supp(x_N)``;
    points off the support are ignored.  Returns whether the certificate's
    value is at most ``2^{M+N}`` together with a report containing the
    counts ``l_r``, the chain ``2^{N-r} <= phi(A_r) <= l_r + ... + l_N``, and
    the growth expression ``N 2^N / (2 (M+2)^2)``.
    """
    n = w.n
    if m < 0:
        raise ValueError("M must be >= 0")
    pieces = branch_partition(w) if certificate is None else [_as_interval_set(p) for p in certificate]
    support = w.support
    pieces = [p & support for p in pieces]
    pieces = [p for p in pieces if p]
    for p in pieces:
        if not p.is_schreier():
            raise CertificateError(f"piece starting at {p.min} has {p.size} elements")
    if sum(p.size for p in pieces) != union_all(pieces).size:
        raise CertificateError("pieces overlap")
    if union_all(pieces) != support:
        raise CertificateError("pieces do not cover the support")
    l = [0] * (n + 1)
    for p in pieces:
        top = max(v for lo, hi, v in w.x_runs if p & IntervalSet([(lo, hi)]))
        l[top.bit_length() - 1] += 1
    value = sum(count * 2 ** r for r, count in enumerate(l))
    chain = []
    for r in range(n + 1):
        phi = phi_intervals(w.levels[r])[0]
        tail = sum(l[r:])
        chain.append({"r": r, "lower": 2 ** (n - r), "phi": phi, "pieces_at_or_above": tail,
                      "ok": 2 ** (n - r) <= phi <= tail})
    consistent = value <= 2 ** (m + n)
    report = {
        "n": n,
        "m": m,
        "l": l,
        "certificate_value": value,
        "normalized_sum": fmt_q(Fraction(value, 2 ** n)),
        "hypothesis_bound": 2 ** (m + n),
        "consistent": consistent,
        "chain": chain,
        "chain_holds": all(c["ok"] for c in chain),
        "growth_expression": fmt_q(Fraction(n, 2 * (m + 2) ** 2)),
        "scaled_growth_expression": fmt_q(Fraction(n * 2 ** n, 2 * (m + 2) ** 2)),
    }
    return consistent, report


# stable vectors and l1 blocks -----------------------------------------

class PreconditionError(ValueError):
    pass


class SupportOrderError(PreconditionError):
    """Supports are not successive (``max supp x < min supp y`` fails)."""


class StabilityError(PreconditionError):
    """The second vector is not stable enough."""


def verify_stable_inequality(x: SparseVector, y: SparseVector, lam, family: SetFamily) -> bool:
    """Exact check of ``||x + lam y|| >= ||x|| + |lam|/2 ||y||``.

    Requires ``supp x < supp y`` and ``y`` to be ``max supp x``-stable.
    """
    lam = Fraction(lam)
    if x.support and y.support and x.support[-1] >= y.support[0]:
        raise SupportOrderError(
            f"max supp x = {x.support[-1]} is not below min supp y = {y.support[0]}")
    if x.support and not is_k_stable(y, x.support[-1], family):
        raise StabilityError(f"y is not {x.support[-1]}-stable")
    lhs = norm_upper(x + y * lam, family)
    return lhs >= norm_upper(x, family) + abs(lam) / 2 * norm_upper(y, family)


@dataclass
class BlockSequenceState:
    index: int  # n
    l: int  # index of the last input used by this block
    k: int  # max supp of y
    y: SparseVector  # normalized block
    block: SparseVector  # unnormalized sum of inputs
    block_norm: Fraction

    def to_json(self) -> dict:
        return {
            "n": self.index, "l": self.l, "k": self.k,
            "block_norm": fmt_q(self.block_norm),
            "y": self.y.to_json(),
        }


class WindowExhausted(RuntimeError):
    """Stability was not reached before the window cap or the end of the input."""

    def __init__(self, message: str, blocks: list, report: dict):
        super().__init__(message)
        self.blocks = blocks
        self.report = report


def unit_vector_stream(start: int = 1) -> Iterator[SparseVector]:
    i = start
    while True:
        yield SparseVector.unit(i)
        i += 1


def build_l1_blocks(xs: Iterable[SparseVector], count: int, family: SetFamily,
                    max_window: int) -> list[BlockSequenceState]:
    """Group successive normalized inputs into blocks ``y_1, y_2, ...``.

    ``y_1 = x_1``; each later block sums inputs until the sum is
    ``k``-stable for ``k = max supp`` of the previous block, then is
    normalized.  Raises :class:`WindowExhausted` (carrying the finished
    blocks) if the window cap or the input runs out first.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    cap = min(max_window, family.window)
    stream = iter(xs)
    used = 0
    last_max = 0

    def take() -> SparseVector | None:
        nonlocal used, last_max
        x = next(stream, None)
        if x is None:
            return None
        if not x.support:
            raise ValueError(f"input {used + 1} is zero")
        if x.support[0] <= last_max:
            raise ValueError(f"input {used + 1} does not start after the previous support")
        if x.support[-1] > cap:
            return None
        if norm_upper(x, family) != 1:
            raise ValueError(f"input {used + 1} is not normalized")
        used += 1
        last_max = x.support[-1]
        return x

    first = take()
    if first is None:
        raise WindowExhausted("no usable first input", [], {"window": cap})
    blocks = [BlockSequenceState(1, used, first.support[-1], first, first, Fraction(1))]
    while len(blocks) < count:
        k = blocks[-1].k
        acc = SparseVector()
        while True:
            x = take()
            if x is None:
                s = sup_norm(acc)
                report = {
                    "window": cap, "blocks_built": len(blocks), "required_k": k,
                    "inputs_used": used,
                    "partial_block_sup": fmt_q(s),
                    # the quasi-norm is at most (pieces in a cover) * sup
                    "partial_block_cover_count": family.cover_count(acc.support) if acc else 0,
                    "needed_norm": fmt_q(4 * k * s),
                }
                raise WindowExhausted(
                    f"block {len(blocks) + 1} did not become {k}-stable inside [1..{cap}]",
                    blocks, report)
            acc = acc + x
            if is_k_stable(acc, k, family):
                break
        value = norm_upper(acc, family)
        y = acc / value
        blocks.append(BlockSequenceState(len(blocks) + 1, used, y.support[-1], y, acc, value))
    return blocks


def l1_lower_bound_holds(blocks: Sequence[BlockSequenceState], lams: Sequence, family: SetFamily) -> bool:
    """``||sum lam_i y_i|| >= 1/2 sum |lam_i|`` for one coefficient vector."""
    z = vector_sum(b.y * Fraction(c) for b, c in zip(blocks, lams))
    return norm_upper(z, family) >= Fraction(1, 2) * sum(abs(Fraction(c)) for c in lams)


def prefix_chain_holds(blocks: Sequence[BlockSequenceState], lams: Sequence, family: SetFamily) -> bool:
    """Every prefix step ``||z_{n-1} + lam_n y_n|| >= ||z_{n-1}|| + |lam_n|/2``."""
    lams = [Fraction(c) for c in lams]
    z = blocks[0].y * lams[0]
    for b, c in zip(blocks[1:], lams[1:]):
        nxt = z + b.y * c
        if norm_upper(nxt, family) < norm_upper(z, family) + abs(c) / 2:
            return False
        z = nxt
    return True


# Schur-property failure -------------------------------------------------

class NotLargeError(ValueError):
    def __init__(self, k: int, m: int):
        super().__init__(f"no member of size {k} inside [{m}..window]; the largeness proxy fails")
        self.k = k
        self.m = m


def schur_witness(family: SetFamily, n: int, y: SparseVector | None = None) -> dict:
    """Unit vectors keep quasi-norm 1 while pairing with a fixed functional decays.

    Refuses with :class:`NotLargeError` when the largeness proxy fails.
    """
    ok, fail = is_large_proxy(family, n)
    if not ok:
        raise NotLargeError(*fail)
    norms = {i: norm_upper(SparseVector.unit(i), family) for i in range(1, family.window + 1)}
    report = {
        "window": family.window,
        "n": n,
        "unit_norms_all_one": all(v == 1 for v in norms.values()),
    }
    if y is not None:
        tail = []
        running = Fraction(0)
        for i in range(family.window, 0, -1):
            running = max(running, abs(y[i]))
            tail.append((i, running))
        tail.reverse()
        report["functional_norm"] = fmt_q(norm_lower(y, family))
        report["pairings"] = [[i, fmt_q(y[i])] for i in range(1, family.window + 1)]
        report["tail_sup"] = [[i, fmt_q(v)] for i, v in tail]
    return report
