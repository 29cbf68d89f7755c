"""Hereditary families of finite subsets of a window ``[1..W]``.

Sets are plain sorted tuples of positive integers.  Two concrete family
types share one interface:

* :class:`SetFamily` stores its members explicitly;
* :class:`SchreierFamily` decides membership by rule, so that windows far
  beyond what could be enumerated (W in the thousands) stay usable.

"Maximal" always means maximal inside the window: a set can be maximal in
``schreier(W)`` while still extendable by indices above ``W``.
"""

from __future__ import annotations

from functools import cached_property, lru_cache
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

IndexSet = tuple  # tuple[int, ...], strictly increasing, all >= 1
DyadicNode = tuple  # tuple[int, ...] of 0/1 bits, length <= N

MATERIALIZE_LIMIT = 2_000_000


class FamilyError(ValueError):
    """Rejected family input (index outside the window, overlap, gap...)."""


def index_set(elements: Iterable[int]) -> IndexSet:
    """Canonical form of a finite index set; rejects indices below 1."""
    out = tuple(sorted(set(int(i) for i in elements)))
    if out and out[0] < 1:
        raise FamilyError(f"indices start at 1, got {out[0]}")
    return out


def canonical_key(s: IndexSet):
    return (len(s), s)


def _maximal_only(sets: Iterable[IndexSet]) -> list[IndexSet]:
    """Inclusion-maximal elements of a collection of sets (canonical order)."""
    uniq = sorted(set(sets), key=lambda s: (-len(s), s))
    kept: list[frozenset] = []
    out = []
    for s in uniq:
        fs = frozenset(s)
        if any(fs <= k for k in kept):
            continue
        kept.append(fs)
        out.append(s)
    return sorted(out, key=canonical_key)


class SetFamily:
    """An explicit family of finite subsets of ``[1..window]``.

    The empty set is always a member.  Members are kept in canonical order
    (by size, then lexicographically).  Most operations assume the family
    is hereditary; use :func:`hereditary_closure` to build one.
    """

    def __init__(self, window: int, sets: Iterable[Iterable[int]] = ()):
        if window < 0:
            raise FamilyError("window must be non-negative")
        self.window = int(window)
        members = {()}
        for s in sets:
            t = index_set(s)
            if t and t[-1] > self.window:
                raise FamilyError(f"set {list(t)} leaves the window [1..{self.window}]")
            members.add(t)
        self._members = frozenset(members)

    # membership -------------------------------------------------------

    def _contains(self, s: IndexSet) -> bool:
        return s in self._members

    def __contains__(self, s) -> bool:
        try:
            t = index_set(s)
        except FamilyError:
            return False
        if t and t[-1] > self.window:
            return False
        return self._contains(t)

    @property
    def sets(self) -> list[IndexSet]:
        return self._sorted_members

    @cached_property
    def _sorted_members(self) -> list[IndexSet]:
        return sorted(self._members, key=canonical_key)

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetFamily):
            return NotImplemented
        return self.window == other.window and set(self.sets) == set(other.sets)

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.window, self._members))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(window={self.window}, members={len(self)})"

    # structural flags -------------------------------------------------

    @cached_property
    def is_hereditary(self) -> bool:
        for s in self.sets:
            for i in range(len(s)):
                if not self._contains(s[:i] + s[i + 1:]):
                    return False
        return True

    @cached_property
    def covers_window(self) -> bool:
        return all(self._contains((i,)) for i in range(1, self.window + 1))

    def maximal_sets(self) -> list[IndexSet]:
        return list(self._maximal)

    @cached_property
    def _maximal(self) -> tuple[IndexSet, ...]:
        out = []
        for s in self.sets:
            present = set(s)
            if not any(
                k not in present and self._contains(tuple(sorted(s + (k,))))
                for k in range(1, self.window + 1)
            ):
                out.append(s)
        return tuple(out)

    # queries restricted to a support ----------------------------------

    def maximal_traces(self, support: Sequence[int]) -> list[IndexSet]:
        """Inclusion-maximal members contained in ``support``.

        For a hereditary family these are the maximal traces ``F ∩ support``
        of window-maximal sets F; every member inside ``support`` lies below
        one of them.
        """
        return list(self._traces(index_set(support)))

    def _traces(self, support: IndexSet) -> tuple[IndexSet, ...]:
        cache = self.__dict__.setdefault("_trace_cache", {})
        if support not in cache:
            if len(cache) > 4096:
                cache.clear()
            cache[support] = self._compute_traces(support)
        return cache[support]

    def _compute_traces(self, support: IndexSet) -> tuple[IndexSet, ...]:
        sup = set(support)
        return tuple(_maximal_only(tuple(i for i in m if i in sup) for m in self._maximal))

    def members_within(self, support: Sequence[int]) -> list[IndexSet]:
        """All members contained in ``support``, by depth-first extension."""
        support = index_set(support)
        out = [()]

        def grow(cur: IndexSet, start: int):
            for p in range(start, len(support)):
                nxt = cur + (support[p],)
                if self._contains(nxt):
                    out.append(nxt)
                    grow(nxt, p + 1)

        grow((), 0)
        return sorted(out, key=canonical_key)

    def max_weight_member(self, weights: Mapping[int, object]):
        """Return ``(total, set)`` maximising the weight sum over members.

        Weights must be non-negative; ties go to the canonically smallest set.
        """
        support = index_set(i for i, w in weights.items() if w)
        best_total, best = 0, ()
        for t in self._traces(support):
            total = sum(weights[i] for i in t)
            if total > best_total or (total == best_total and canonical_key(t) < canonical_key(best)):
                best_total, best = total, t
        return best_total, best

    def largest_member_within(self, avail: Sequence[int], must: int,
                              prefer: Callable[[int], object] | None = None) -> IndexSet:
        """A largest member inside ``avail`` that contains ``must``."""
        best = ()
        for t in self._traces(index_set(avail)):
            if must in t and (len(t) > len(best) or (len(t) == len(best) and t < best)):
                best = t
        return best

    def extend_to_maximal(self, s: Iterable[int]) -> IndexSet:
        """Grow a member to a window-maximal one, adding smallest indices first."""
        cur = index_set(s)
        if not self._contains(cur):
            raise FamilyError(f"{list(cur)} is not a member")
        changed = True
        while changed:
            changed = False
            present = set(cur)
            for k in range(1, self.window + 1):
                if k in present:
                    continue
                cand = tuple(sorted(cur + (k,)))
                if self._contains(cand):
                    cur, changed = cand, True
                    break
        return cur

    def cover_count(self, support: Sequence[int]) -> int:
        """Number of pieces in a greedy partition of ``support`` into members."""
        rest = list(index_set(support))
        count = 0
        while rest:
            piece = self.largest_member_within(rest, rest[0])
            if not piece:
                raise FamilyError(f"index {rest[0]} lies in no member")
            taken = set(piece)
            rest = [i for i in rest if i not in taken]
            count += 1
        return count

    def materialize(self) -> "SetFamily":
        return self

    def to_json(self) -> dict:
        return {"window": self.window, "sets": [list(s) for s in self.sets]}

    @classmethod
    def from_json(cls, data: Mapping) -> "SetFamily":
        if "generator" in data:
            return family_from_generator(data)
        return cls(int(data["window"]), data["sets"])


class SchreierFamily(SetFamily):
    """Schreier family of a given order restricted to ``[1..window]``.

    Order 0 is the family of singletons; order ``k+1`` collects the unions
    ``E_1 ∪ ... ∪ E_n`` of successive order-``k`` sets ``E_1 < ... < E_n``
    with ``n <= min E_1``.  Order 1 is the classical family
    ``{A : |A| <= min A}`` and gets closed-form fast paths.
    """

    def __init__(self, window: int, order: int = 1):
        if window < 1:
            raise FamilyError("window must be >= 1")
        if order < 0:
            raise FamilyError("order must be >= 0")
        self.window = int(window)
        self.order = int(order)

    def __repr__(self) -> str:
        return f"SchreierFamily(window={self.window}, order={self.order})"

    def __eq__(self, other) -> bool:
        if isinstance(other, SchreierFamily):
            return (self.window, self.order) == (other.window, other.order)
        return SetFamily.__eq__(self, other)

    def __hash__(self):
        return hash(("schreier", self.window, self.order))

    def _contains(self, s: IndexSet) -> bool:
        if s and (s[0] < 1 or s[-1] > self.window):
            return False
        return _in_schreier(s, self.order)

    @cached_property
    def _sorted_members(self) -> list[IndexSet]:
        out = self.members_within(range(1, self.window + 1))
        if len(out) > MATERIALIZE_LIMIT:
            raise FamilyError("family too large to enumerate")
        return out

    @cached_property
    def _members(self) -> frozenset:
        return frozenset(self._sorted_members)

    @cached_property
    def is_hereditary(self) -> bool:
        return True

    @cached_property
    def covers_window(self) -> bool:
        return True

    @cached_property
    def _maximal(self) -> tuple[IndexSet, ...]:
        if self.order != 1:
            return SetFamily._maximal.func(self)
        out = []
        for s in self._traces(tuple(range(1, self.window + 1))):
            out.append(s)
        return tuple(sorted(out, key=canonical_key))

    def members_within(self, support):
        support = index_set(support)
        out = [()]

        def grow(cur, start):
            for p in range(start, len(support)):
                nxt = cur + (support[p],)
                if self._contains(nxt):
                    out.append(nxt)
                    grow(nxt, p + 1)
                    if len(out) > MATERIALIZE_LIMIT:
                        raise FamilyError("too many members to enumerate")

        grow((), 0)
        return sorted(out, key=canonical_key)

    def _compute_traces(self, support: IndexSet) -> tuple[IndexSet, ...]:
        if self.order != 1:
            return tuple(_maximal_only(self.members_within(support)))
        support = tuple(i for i in support if i <= self.window)
        full: list[IndexSet] = []
        short: list[IndexSet] = []
        for p, m in enumerate(support):
            rest = support[p + 1:]
            if len(rest) <= m - 1:
                short.append((m,) + rest)
            else:
                for c in combinations(rest, m - 1):
                    full.append((m,) + c)
                    if len(full) > MATERIALIZE_LIMIT:
                        raise FamilyError("too many maximal traces to enumerate")
        # a set with |A| = min A is never strictly contained in another Schreier set
        kept = list(full)
        for p, s in enumerate(short):
            # only an earlier short set {m'} ∪ tail can contain a later tail set
            if not any(set(s) <= set(o) for o in short[:p]):
                kept.append(s)
        return tuple(sorted(kept, key=canonical_key))

    def max_weight_member(self, weights):
        if self.order != 1:
            return SetFamily.max_weight_member(self, weights)
        items = sorted((i, w) for i, w in weights.items() if w and i <= self.window)
        best_total, best = 0, ()
        for p, (m, wm) in enumerate(items):
            if m > self.window:
                break
            rest = sorted(items[p + 1:], key=lambda t: (-t[1], t[0]))[: m - 1]
            total = wm + sum(w for _, w in rest)
            cand = index_set([m] + [i for i, _ in rest])
            if total > best_total or (total == best_total and canonical_key(cand) < canonical_key(best)):
                best_total, best = total, cand
        return best_total, best

    def largest_member_within(self, avail, must, prefer=None):
        if self.order != 1:
            return SetFamily.largest_member_within(self, avail, must, prefer)
        avail = index_set(avail)
        if must not in avail or must > self.window:
            return ()
        n = len(avail)
        best_size, best_p = 0, None
        for p, m in enumerate(avail):
            if m > must:
                break
            if m < must and m < 2:
                continue  # {m, must} itself would be too big
            size = min(m, n - p)
            if size > best_size:
                best_size, best_p = size, p
        m = avail[best_p]
        pool = [i for i in avail[best_p + 1:] if i != must]
        if prefer is not None:
            pool.sort(key=lambda i: (prefer(i), i))
        chosen = {m, must}
        chosen.update(pool[: best_size - len(chosen)])
        return index_set(chosen)

    def extend_to_maximal(self, s):
        cur = index_set(s)
        if not self._contains(cur):
            raise FamilyError(f"{list(cur)} is not a member")
        if self.order != 1:
            return SetFamily.extend_to_maximal(self, cur)
        if cur:
            present = set(cur)
            free = [k for k in range(cur[0] + 1, self.window + 1) if k not in present]
            cur = index_set(cur + tuple(free[: cur[0] - len(cur)]))
        # a short tail may still admit a smaller new minimum
        return SetFamily.extend_to_maximal(self, cur)

    def cover_count(self, support):
        if self.order != 1:
            return SetFamily.cover_count(self, support)
        return len(consecutive_schreier_blocks(index_set(support)))

    def materialize(self) -> SetFamily:
        return SetFamily(self.window, self.sets)

    def to_json(self) -> dict:
        return {"window": self.window, "sets": [list(s) for s in self.sets]}


def consecutive_schreier_blocks(a: IndexSet) -> list[IndexSet]:
    """Split ``a`` into successive Schreier blocks, each a maximal prefix."""
    blocks = []
    i = 0
    while i < len(a):
        m = a[i]
        blocks.append(tuple(a[i:i + m]))
        i += m
    return blocks


def _greedy_blocks(s: IndexSet, order: int) -> int:
    """Fewest successive order-``order`` Schreier blocks covering ``s``."""
    count, i = 0, 0
    while i < len(s):
        j = i + 1
        while j < len(s) and _in_schreier(s[i:j + 1], order):
            j += 1
        count += 1
        i = j
    return count


@lru_cache(maxsize=1 << 16)
def _in_schreier(s: IndexSet, order: int) -> bool:
    if not s:
        return True
    if order == 0:
        return len(s) == 1
    if order == 1:
        return len(s) <= s[0]
    return _greedy_blocks(s, order - 1) <= s[0]


# generators -----------------------------------------------------------

def hereditary_closure(sets: Iterable[Iterable[int]], window: int) -> SetFamily:
    """Smallest hereditary family on ``[1..window]`` containing ``sets``."""
    gens = [index_set(s) for s in sets]
    for g in gens:
        if g and g[-1] > window:
            raise FamilyError(f"set {list(g)} leaves the window [1..{window}]")
    members = set()
    for g in _maximal_only(gens):
        for r in range(len(g) + 1):
            members.update(combinations(g, r))
    return SetFamily(window, members)


def schreier(window: int) -> SchreierFamily:
    return SchreierFamily(window, order=1)


def schreier_order(k: int, window: int) -> SchreierFamily:
    if k < 1:
        raise FamilyError("order must be >= 1")
    return SchreierFamily(window, order=k)


def partition_family(pieces: Iterable[Iterable[int]], window: int) -> SetFamily:
    pieces = [index_set(p) for p in pieces]
    seen: set[int] = set()
    for p in pieces:
        overlap = seen.intersection(p)
        if overlap:
            raise FamilyError(f"pieces overlap at {sorted(overlap)}")
        seen.update(p)
    if seen != set(range(1, window + 1)):
        missing = sorted(set(range(1, window + 1)) - seen)
        extra = sorted(seen - set(range(1, window + 1)))
        raise FamilyError(f"pieces must partition [1..{window}] (missing {missing}, outside {extra})")
    return hereditary_closure(pieces, window)


def node_index(node: DyadicNode) -> int:
    """Breadth-first index of a node of the dyadic tree; the root is 1."""
    idx = 1
    for b in node:
        idx = 2 * idx + b
    return idx


def tree_nodes(n: int) -> list[DyadicNode]:
    """All nodes of ``{0,1}^{<=n}`` in breadth-first order."""
    out: list[DyadicNode] = [()]
    level: list[DyadicNode] = [()]
    for _ in range(n):
        level = [s + (b,) for s in level for b in (0, 1)]
        out.extend(level)
    return out


def tree_family(n: int) -> tuple[SetFamily, dict]:
    """Hereditary closure of the root-to-leaf branches of ``{0,1}^{<=n}``."""
    if n < 1:
        raise FamilyError("N must be >= 1")
    nodes = tree_nodes(n)
    index = {s: node_index(s) for s in nodes}
    branches = [
        tuple(index[leaf[:k]] for k in range(n + 1))
        for leaf in nodes if len(leaf) == n
    ]
    return hereditary_closure(branches, len(nodes)), index


def disjoint_sum(families: Sequence[SetFamily]) -> tuple[SetFamily, list[int]]:
    """Place the families side by side on consecutive windows.

    Returns the combined family and the offset added to each family's indices.
    """
    offsets = []
    members = []
    shift = 0
    for fam in families:
        offsets.append(shift)
        members.extend(tuple(i + shift for i in s) for s in fam.sets)
        shift += fam.window
    return SetFamily(shift, members), offsets


def is_large_proxy(family: SetFamily, n: int) -> tuple[bool, tuple[int, int] | None]:
    """Finite stand-in for largeness: tails of the window hold members of every size <= n.

    Checks every ``k <= n`` and tail start ``m`` with ``m + 2k <= W``; returns the
    first failing ``(k, m)``.  Passing is necessary, not sufficient, for largeness.
    """
    w = family.window
    for m in range(1, w + 1):
        ks = [k for k in range(1, n + 1) if m + 2 * k <= w]
        if not ks:
            break
        size, _ = family.max_weight_member({i: 1 for i in range(m, w + 1)})
        for k in ks:
            if size < k:
                return False, (k, m)
    return True, None


GENERATORS = ("schreier", "schreier-order", "partition", "tree", "sum")


def parse_pieces(text: str) -> list[IndexSet]:
    """Parse ``"1;2,3"`` into ``[(1,), (2, 3)]``."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if chunk:
            out.append(index_set(int(v) for v in chunk.split(",")))
    return out


def family_from_generator(spec: Mapping) -> SetFamily:
    """Build a family from ``{"generator": name, ...params}``."""
    name = spec.get("generator")
    try:
        if name == "schreier":
            return schreier(int(spec["window"]))
        if name == "schreier-order":
            return schreier_order(int(spec["order"]), int(spec["window"]))
        if name == "partition":
            pieces = spec["pieces"]
            if isinstance(pieces, str):
                pieces = parse_pieces(pieces)
            window = int(spec.get("window") or max(max(p) for p in pieces if p))
            return partition_family(pieces, window)
        if name == "tree":
            return tree_family(int(spec["n"]))[0]
        if name == "sum":
            return disjoint_sum([family_from_generator(p) for p in spec["parts"]])[0]
    except KeyError as exc:
        raise FamilyError(f"generator {name!r} needs parameter {exc.args[0]!r}") from None
    raise FamilyError(f"unknown generator {name!r}; expected one of {', '.join(GENERATORS)}")
