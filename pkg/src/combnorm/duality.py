"""Extreme points, the dual norm and the envelope (convexified) norm.

Both linear programs are posed over ``|y|`` with non-negative variables, one
row or column per maximal trace ``F ∩ supp(y)``:

* packing (:func:`dual_norm`): maximise ``sum u_k |y_k|`` subject to
  ``sum_{k in G} u_k <= 1`` for every maximal trace ``G``;
* covering (:func:`envelope_gauge`): minimise ``sum lambda_G`` subject to
  ``sum_{G ∋ k} lambda_G >= |y_k|``.

They are LP duals of each other, but each is solved on its own so that
equality of the two values is a real check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .family import IndexSet, SetFamily, canonical_key
from .lp import LinearProgram, solve_lp
from .norms import (InfeasibleError, _check_window, norm_upper, norm_upper_exact,
                    norm_upper_greedy)
from .vector import SparseVector, fmt_q, vector_sum


@dataclass(frozen=True)
class ExtremePoint:
    """The vector ``sum_{i in base} signs[i] e_i``."""

    base: IndexSet
    signs: tuple

    def __post_init__(self):
        if len(self.base) != len(self.signs):
            raise ValueError("one sign per base element is required")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    def vector(self) -> SparseVector:
        return SparseVector(zip(self.base, self.signs))

    def to_json(self) -> dict:
        return {"set": list(self.base), "signs": list(self.signs)}

    @classmethod
    def from_json(cls, data) -> "ExtremePoint":
        return cls(tuple(data["set"]), tuple(int(s) for s in data["signs"]))


def _sign_patterns(n: int):
    return product((1, -1), repeat=n)


def extreme_points(family: SetFamily, restrict_to: Iterable[int] | None = None) -> list[ExtremePoint]:
    """All sign patterns on window-maximal sets.

    With ``restrict_to`` the bases are first intersected with it and
    deduplicated (empty traces dropped), which is all a vector supported in
    ``restrict_to`` can see.
    """
    bases = family.maximal_sets()
    if restrict_to is not None:
        keep = set(restrict_to)
        bases = sorted({tuple(i for i in b if i in keep) for b in bases} - {()},
                       key=canonical_key)
    return [ExtremePoint(b, signs) for b in bases for signs in _sign_patterns(len(b))]


def extreme_point_count(family: SetFamily) -> int:
    return sum(2 ** len(b) for b in family.maximal_sets())


def _traces_for(y: SparseVector, family: SetFamily) -> list[IndexSet]:
    _check_window(y, family)
    for i in y.support:
        if (i,) not in family:
            raise InfeasibleError(f"index {i} lies in no member")
    return family.maximal_traces(y.support)


def packing_program(y: SparseVector, family: SetFamily) -> LinearProgram:
    """The packing LP whose optimum is the dual norm of ``y``."""
    support = y.support
    traces = _traces_for(y, family)
    rows = [([1 if i in set(g) else 0 for i in support], "<=", 1) for g in traces]
    return LinearProgram([abs(y[i]) for i in support], rows, sense="max")


def covering_program(y: SparseVector, family: SetFamily) -> tuple[LinearProgram, list[IndexSet]]:
    """The covering LP whose optimum is the envelope norm of ``y``; also returns its columns."""
    traces = _traces_for(y, family)
    cols = [set(g) for g in traces]
    rows = [([1 if i in g else 0 for g in cols], ">=", abs(y[i])) for i in y.support]
    return LinearProgram([1] * len(traces), rows, sense="min"), traces


def dual_norm_with_functional(y: SparseVector, family: SetFamily) -> tuple[Fraction, SparseVector]:
    """Dual norm and a maximising ``x`` with ``||x||_F <= 1`` and ``<x, y> = value``."""
    if not y.support:
        return Fraction(0), SparseVector()
    res = solve_lp(packing_program(y, family))
    if res.status != "optimal":
        raise RuntimeError(f"packing program ended {res.status}")
    x = SparseVector((i, u if y[i] > 0 else -u) for i, u in zip(y.support, res.x))
    return res.value, x


def dual_norm(y: SparseVector, family: SetFamily) -> Fraction:
    """``sup{<x, y> : ||x||_F <= 1}`` via the packing program."""
    return dual_norm_with_functional(y, family)[0]


def envelope_gauge(y: SparseVector, family: SetFamily) -> tuple[Fraction, list]:
    """Envelope norm of ``y`` with a convex-combination witness.

    The witness is a list of ``(weight, ExtremePoint)`` whose weights sum to
    the value and whose weighted sum is exactly ``y``.  Each LP column ``G``
    with ``lambda_G > 0`` carries the vector ``y_k / c_k`` on ``G`` (``c_k`` the
    coverage of ``k``); it is split into sign patterns on a maximal set
    ``F ⊇ G`` by thresholding a single uniform variable.
    """
    if not y.support:
        return Fraction(0), []
    lp, traces = covering_program(y, family)
    res = solve_lp(lp)
    if res.status != "optimal":
        raise RuntimeError(f"covering program ended {res.status}")
    coverage = {i: Fraction(0) for i in y.support}
    for g, lam in zip(traces, res.x):
        for i in g:
            coverage[i] += lam
    merged: dict[ExtremePoint, Fraction] = {}
    for g, lam in zip(traces, res.x):
        if not lam:
            continue
        base = family.extend_to_maximal(g)
        # probability of a +1 sign on each coordinate of the base
        plus = {i: (1 + (y[i] / coverage[i] if i in coverage else 0)) / Fraction(2) for i in base}
        cuts = sorted(set(plus.values()) | {Fraction(0), Fraction(1)})
        for lo, hi in zip(cuts, cuts[1:]):
            signs = tuple(1 if lo < plus[i] else -1 for i in base)
            point = ExtremePoint(base, signs)
            merged[point] = merged.get(point, Fraction(0)) + lam * (hi - lo)
    witness = sorted(((w, p) for p, w in merged.items() if w),
                     key=lambda t: (canonical_key(t[1].base), t[1].signs))
    return res.value, witness


def check_envelope_witness(y: SparseVector, value: Fraction, witness: Sequence, family: SetFamily) -> None:
    """Raise ``ValueError`` unless the witness is a valid decomposition of ``y``."""
    maximal = set(family.maximal_sets())
    total = Fraction(0)
    for w, p in witness:
        if w <= 0:
            raise ValueError("weights must be positive")
        if p.base not in maximal:
            raise ValueError(f"base {list(p.base)} is not a maximal set")
        total += w
    if total != value:
        raise ValueError(f"weights sum to {total}, expected {value}")
    if vector_sum(p.vector() * w for w, p in witness) != y:
        raise ValueError("weighted extreme points do not sum to the vector")


def _grow_piece(piece: IndexSet, support: IndexSet, family: SetFamily) -> IndexSet:
    """The canonically first maximal trace of ``support`` containing ``piece``."""
    need = set(piece)
    for t in family.maximal_traces(support):
        if need <= set(t):
            return t
    return piece


def envelope_decomposition_search(y: SparseVector, family: SetFamily, parts: int,
                                  beam: int = 3) -> Fraction:
    """Upper bound on the envelope norm from explicit decompositions.

    Beam search over ``y = t_1 s_1 χ_{G_1} + ... + residual`` where each term is
    constant in absolute value on a member ``G`` (so its quasi-norm is ``t``).
    ``G`` is an optimal- or greedy-certificate piece of the current residual,
    grown to a maximal trace, and ``t`` is the least ``|residual|`` on it.  At
    most ``parts`` vectors are used, the residual counting as one.
    """
    if parts < 1:
        raise ValueError("parts must be >= 1")
    best = norm_upper(y, family)
    # state: (score, cost so far, residual, terms used)
    frontier = [(best, Fraction(0), y, 0)]
    seen = {y}
    while frontier:
        nxt = []
        for _, cost, r, used in frontier:
            if used + 2 > parts or not r.support:
                continue
            pieces = set(norm_upper_exact(r, family)[1].pieces)
            pieces.update(norm_upper_greedy(r, family)[1].pieces)
            for piece in sorted(pieces, key=canonical_key):
                g = _grow_piece(piece, r.support, family)
                t = min(abs(r[i]) for i in g)
                term = SparseVector((i, t if r[i] > 0 else -t) for i in g)
                rest = r - term
                if rest in seen:
                    continue
                seen.add(rest)
                score = cost + t + norm_upper(rest, family)
                best = min(best, score)
                nxt.append((score, cost + t, rest, used + 1))
        nxt.sort(key=lambda s: (s[0], sorted(s[2].support)))
        frontier = nxt[:beam]
    return best


def quasi_dual_functional_norm(y: SparseVector, family: SetFamily) -> Fraction:
    """``max <x, y>`` over extreme points ``x`` of the quasi-norm ball."""
    _check_window(y, family)
    if not y.support:
        return Fraction(0)
    return max(p.vector().dot(y) for p in extreme_points(family, restrict_to=y.support))


def convexity_ratio(xs: Sequence[SparseVector], family: SetFamily) -> Fraction:
    """``||sum xs||^F / sum ||x_i||^F``."""
    if not xs:
        raise ValueError("need at least one vector")
    denom = sum((norm_upper(x, family) for x in xs), Fraction(0))
    if not denom:
        raise ValueError("all vectors are zero")
    return norm_upper(vector_sum(xs), family) / denom


def _perturbations(e: SparseVector, family: SetFamily):
    window = range(1, family.window + 1)
    for eta in (Fraction(1), Fraction(1, 2)):
        for i in window:
            yield SparseVector({i: eta})
        for i in window:
            for j in window:
                if i < j:
                    yield SparseVector({i: eta, j: eta})
                    yield SparseVector({i: eta, j: -eta})
        # constant perturbations on the room left by each certificate piece
        for piece in norm_upper_exact(e, family)[1].pieces:
            grown = family.extend_to_maximal(piece)
            extra = [i for i in grown if i not in piece]
            if extra:
                yield SparseVector.indicator(extra, eta)


def perturbation_witness(e: SparseVector, family: SetFamily) -> SparseVector | None:
    """A nonzero ``x`` from the finite perturbation set with ``e ± x`` in the unit ball."""
    for x in _perturbations(e, family):
        if norm_upper(e + x, family) <= 1 and norm_upper(e - x, family) <= 1:
            return x
    return None


def is_extreme_by_perturbation(e: SparseVector, family: SetFamily) -> bool:
    """``e`` lies in the quasi-norm unit ball and no tested perturbation moves
    it symmetrically inside the ball."""
    if norm_upper(e, family) > 1:
        return False
    return perturbation_witness(e, family) is None


def witness_to_json(value: Fraction, witness: Sequence) -> dict:
    return {
        "value": fmt_q(value),
        "decomposition": [{"weight": fmt_q(w), **p.to_json()} for w, p in witness],
    }

