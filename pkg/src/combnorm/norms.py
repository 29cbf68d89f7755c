"""Exact evaluation of the family norm and the partition quasi-norm.

``norm_lower`` is the supremum over members of ``sum |x(k)|``.
``norm_upper_exact`` is the minimum, over partitions of the support into
members, of the sum of per-piece maxima of ``|x|``; it is a minimum-cost
exact set partition problem and is solved by search over uncovered subsets.

All arithmetic is in :class:`fractions.Fraction`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Sequence

from .family import FamilyError, IndexSet, SetFamily, consecutive_schreier_blocks, index_set
from .vector import SparseVector, fmt_q

DP_LIMIT = 22
LP_BOUND_MAX_TRACES = 400


class InfeasibleError(ValueError):
    """Some support point lies in no member of the family."""


class SolverLimitExceeded(RuntimeError):
    """The exact search hit its node or time cap; carries the bounds reached."""

    def __init__(self, lower: Fraction, upper: Fraction, certificate: "PartitionCertificate"):
        super().__init__(f"search incomplete: value in [{lower}, {upper}]")
        self.lower = lower
        self.upper = upper
        self.certificate = certificate


@dataclass(frozen=True)
class PartitionCertificate:
    """Pairwise disjoint pieces covering a support, with their cost."""

    pieces: tuple
    value: Fraction

    def to_json(self) -> dict:
        return {"value": fmt_q(self.value), "pieces": [list(p) for p in self.pieces]}

    @classmethod
    def from_json(cls, data) -> "PartitionCertificate":
        return cls(tuple(index_set(p) for p in data["pieces"]), Fraction(data["value"]))

    def check(self, x: SparseVector, family: SetFamily | None = None) -> None:
        """Raise ``ValueError`` unless this certifies ``value`` for ``x``."""
        if family is not None:
            for p in self.pieces:
                if p not in family:
                    raise ValueError(f"piece {list(p)} is not a family member")
        value = norm_for_partition(x, self.pieces)
        if value != self.value:
            raise ValueError(f"pieces cost {value}, certificate claims {self.value}")


def _check_window(x: SparseVector, family: SetFamily) -> None:
    if x.support and x.support[-1] > family.window:
        raise FamilyError(
            f"support reaches index {x.support[-1]} beyond the window [1..{family.window}]")


def sup_norm(x: SparseVector) -> Fraction:
    return max((abs(v) for _, v in x.items()), default=Fraction(0))


def norm_lower(x: SparseVector, family: SetFamily) -> Fraction:
    """``sup_F sum_{k in F} |x(k)|`` over members of ``family``."""
    _check_window(x, family)
    total, _ = family.max_weight_member({i: abs(v) for i, v in x.items()})
    return Fraction(total)


def norm_for_partition(x: SparseVector, pieces: Iterable[Iterable[int]]) -> Fraction:
    """Cost ``sum_P max_{k in P} |x(k)|`` of a given partition.

    The pieces must be pairwise disjoint and cover the support of ``x``.
    """
    seen: set[int] = set()
    total = Fraction(0)
    for p in pieces:
        p = index_set(p)
        if seen.intersection(p):
            raise ValueError(f"pieces overlap at {sorted(seen.intersection(p))}")
        seen.update(p)
        total += max((abs(x[i]) for i in p), default=Fraction(0))
    missing = [i for i in x.support if i not in seen]
    if missing:
        raise ValueError(f"pieces do not cover support points {missing}")
    return total


class _PartitionSearch:
    """Shared machinery for exact and bounded searches over bitmasks.

    Bit ``p`` stands for the ``p``-th support index.  Every step branches on
    the uncovered point with the largest ``|x|`` (smallest index on ties); its
    piece then costs exactly that value, so only inclusion-maximal admissible
    pieces need to be tried.
    """

    def __init__(self, x: SparseVector, family: SetFamily):
        _check_window(x, family)
        self.support = x.support
        self.vals = [abs(x[i]) for i in self.support]
        for i in self.support:
            if (i,) not in family:
                raise InfeasibleError(f"index {i} lies in no member")
        pos = {i: p for p, i in enumerate(self.support)}
        traces = family.maximal_traces(self.support)
        self.trace_masks = [sum(1 << pos[i] for i in t) for t in traces]
        n = len(self.support)
        self.order = sorted(range(n), key=lambda p: (-self.vals[p], p))
        self.with_point = [[t for t in self.trace_masks if t >> p & 1] for p in range(n)]
        # points sharing some member with p
        self.compatible = [0] * n
        for p in range(n):
            for t in self.with_point[p]:
                self.compatible[p] |= t
        self._pieces: dict[int, IndexSet] = {}
        self._cands: dict[int, list[int]] = {}

    def piece(self, mask: int) -> IndexSet:
        out = self._pieces.get(mask)
        if out is None:
            out = tuple(self.support[p] for p in range(len(self.support)) if mask >> p & 1)
            self._pieces[mask] = out
        return out

    def top(self, mask: int) -> int:
        for p in self.order:
            if mask >> p & 1:
                return p
        raise ValueError("empty mask")

    def candidates(self, mask: int) -> list[int]:
        out = self._cands.get(mask)
        if out is not None:
            return out
        j = self.top(mask)
        uniq = sorted({t & mask for t in self.with_point[j]},
                      key=lambda c: (-c.bit_count(), self.piece(c)))
        out = []
        for c in uniq:
            if not any(c & k == c for k in out):
                out.append(c)
        if len(self._cands) < 200_000:
            self._cands[mask] = out
        return out

    def max_value(self, mask: int) -> Fraction:
        for p in self.order:
            if mask >> p & 1:
                return self.vals[p]
        return Fraction(0)

    def two_level_bound(self, mask: int) -> Fraction:
        if not mask:
            return Fraction(0)
        j = self.top(mask)
        second = min(self.max_value(mask & ~c) for c in self.candidates(mask))
        return self.vals[j] + second

    def conflict_bound(self, mask: int) -> Fraction:
        """Sum of values over pairwise incompatible points, chosen greedily:
        no piece holds two of them, so each is paid for separately."""
        total = Fraction(0)
        blocked = 0
        for p in self.order:
            if mask >> p & 1 and not blocked >> p & 1:
                total += self.vals[p]
                blocked |= self.compatible[p]
        return total

    def bound(self, mask: int) -> Fraction:
        if not mask:
            return Fraction(0)
        return max(self.two_level_bound(mask), self.conflict_bound(mask))

    def full(self) -> int:
        return (1 << len(self.support)) - 1

    def dp(self):
        memo: dict[int, tuple] = {0: (Fraction(0), ())}

        def solve(mask: int):
            hit = memo.get(mask)
            if hit is not None:
                return hit
            j = self.top(mask)
            best = None
            for c in self.candidates(mask):
                sub_value, sub_cert = solve(mask & ~c)
                cand = (self.vals[j] + sub_value, tuple(sorted(sub_cert + (self.piece(c),))))
                if best is None or cand < best:
                    best = cand
            memo[mask] = best
            return best

        return solve(self.full())

    def branch_and_bound(self, incumbent: tuple, root_bound: Fraction,
                         node_limit: int | None, deadline: float | None):
        best = [incumbent]
        seen: dict[int, Fraction] = {}
        nodes = 0

        def dfs(mask: int, acc: Fraction, pieces: tuple):
            nonlocal nodes
            nodes += 1
            if (node_limit is not None and nodes > node_limit) or (
                    deadline is not None and nodes % 256 == 0 and time.monotonic() > deadline):
                raise _Abort
            if not mask:
                cand = (acc, tuple(sorted(self.piece(c) for c in pieces)))
                if cand < best[0]:
                    best[0] = cand
                return
            prev = seen.get(mask)
            if prev is not None and prev <= acc:
                return
            seen[mask] = acc
            j = self.top(mask)
            scored = []
            for c in self.candidates(mask):
                rest = mask & ~c
                scored.append((acc + self.vals[j] + self.bound(rest), c))
            scored.sort(key=lambda t: (t[0], -t[1].bit_count()))
            for bound, c in scored:
                if bound >= best[0][0]:
                    break
                dfs(mask & ~c, acc + self.vals[j], pieces + (c,))

        if root_bound >= incumbent[0]:
            return incumbent
        try:
            dfs(self.full(), Fraction(0), ())
        except _Abort:
            lower = root_bound
            value, cert = best[0]
            raise SolverLimitExceeded(lower, value, PartitionCertificate(cert, value)) from None
        return best[0]


class _Abort(Exception):
    pass


def _lp_bound(x: SparseVector, family: SetFamily) -> Fraction:
    """Packing-LP lower bound; skipped (0) when the LP would be large."""
    if len(family.maximal_traces(x.support)) > LP_BOUND_MAX_TRACES:
        return Fraction(0)
    from .duality import dual_norm
    return dual_norm(x, family)


def norm_upper_exact(x: SparseVector, family: SetFamily, *,
                     node_limit: int | None = None,
                     time_limit: float | None = None) -> tuple[Fraction, PartitionCertificate]:
    """Exact partition quasi-norm with an optimal certificate.

    Supports of up to ``DP_LIMIT`` points are solved by memoised search over
    uncovered subsets and return the lexicographically smallest optimal piece
    list (pieces drawn from maximal traces).  Larger supports go through
    branch-and-bound seeded by :func:`norm_upper_greedy`; ``node_limit`` and
    ``time_limit`` (seconds) cap that search and raise
    :class:`SolverLimitExceeded` with the bounds reached.
    """
    if not x.support:
        _check_window(x, family)
        return Fraction(0), PartitionCertificate((), Fraction(0))
    if node_limit is None and time_limit is None:
        return _exact_cached(x, family)
    return _exact(x, family, node_limit, time_limit)


@lru_cache(maxsize=4096)
def _exact_cached(x: SparseVector, family: SetFamily):
    return _exact(x, family, None, None)


def _exact(x, family, node_limit, time_limit):
    search = _PartitionSearch(x, family)
    if len(x.support) <= DP_LIMIT:
        value, cert = search.dp()
        return value, PartitionCertificate(cert, value)
    deadline = None if time_limit is None else time.monotonic() + time_limit
    greedy_value, greedy_cert = norm_upper_greedy(x, family)
    root = max(search.bound(search.full()), _lp_bound(x, family))
    value, cert = search.branch_and_bound((greedy_value, greedy_cert.pieces), root,
                                          node_limit, deadline)
    return value, PartitionCertificate(tuple(cert), value)


def norm_upper(x: SparseVector, family: SetFamily) -> Fraction:
    return norm_upper_exact(x, family)[0]


def norm_upper_greedy(x: SparseVector, family: SetFamily) -> tuple[Fraction, PartitionCertificate]:
    """Feasible certificate: repeatedly cut the largest admissible piece
    around the largest uncovered value."""
    _check_window(x, family)
    absx = {i: abs(v) for i, v in x.items()}
    remaining = list(x.support)
    pieces = []
    value = Fraction(0)
    while remaining:
        j = min(remaining, key=lambda i: (-absx[i], i))
        piece = family.largest_member_within(remaining, j, prefer=lambda i: -absx[i])
        if not piece:
            raise InfeasibleError(f"index {j} lies in no member")
        value += absx[j]
        pieces.append(piece)
        taken = set(piece)
        remaining = [i for i in remaining if i not in taken]
    pieces.sort()
    return value, PartitionCertificate(tuple(pieces), value)


def is_k_stable(x: SparseVector, k: int, family: SetFamily) -> bool:
    """Whether ``||x||_inf <= ||x||^F / (4k)``, decided exactly."""
    if k < 1:
        raise ValueError("k must be >= 1")
    s = sup_norm(x)
    threshold = 4 * k * s
    if not s:
        return True
    # any partition bounds the quasi-norm by (pieces) * sup from above
    if family.cover_count(x.support) * s < threshold:
        return False
    return threshold <= norm_upper(x, family)


def phi_consecutive_schreier(a: Sequence[int]) -> tuple[int, list[IndexSet]]:
    """Fewest successive Schreier blocks ``A_1 < A_2 < ...`` partitioning ``a``."""
    a = index_set(a)
    if not a:
        raise ValueError("phi needs a nonempty set")
    blocks = consecutive_schreier_blocks(a)
    return len(blocks), blocks
