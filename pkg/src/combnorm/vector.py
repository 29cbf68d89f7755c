"""Finitely supported rational vectors indexed from 1."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping


def as_fraction(value) -> Fraction:
    """Exact conversion; strings may be ``"p/q"``, ``"p"`` or decimals."""
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a Fraction, int or 'p/q' string")
    return Fraction(value)


def fmt_q(q) -> str:
    """Render a rational as ``"p/q"`` in lowest terms (``"3/1"`` for integers)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


class SparseVector:
    """Immutable map ``index -> Fraction`` with zero entries dropped."""

    __slots__ = ("_entries", "_support")

    def __init__(self, entries: Mapping[int, object] | Iterable[tuple[int, object]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        data = {}
        for i, v in items:
            i = int(i)
            if i < 1:
                raise ValueError(f"indices start at 1, got {i}")
            q = as_fraction(v)
            if q:
                data[i] = q
        self._entries = data
        self._support = tuple(sorted(data))

    @classmethod
    def from_dense(cls, values: Iterable[object], start: int = 1) -> "SparseVector":
        return cls((start + k, v) for k, v in enumerate(values))

    @classmethod
    def unit(cls, i: int) -> "SparseVector":
        return cls({i: 1})

    @classmethod
    def indicator(cls, indices: Iterable[int], value=1) -> "SparseVector":
        return cls((i, value) for i in indices)

    @property
    def support(self) -> tuple[int, ...]:
        return self._support

    def __getitem__(self, i: int) -> Fraction:
        return self._entries.get(i, Fraction(0))

    def items(self):
        return ((i, self._entries[i]) for i in self._support)

    def __len__(self) -> int:
        return len(self._support)

    def __bool__(self) -> bool:
        return bool(self._support)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self):
        return hash(tuple(self.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{i}: {fmt_q(v)}" for i, v in self.items())
        return f"SparseVector({{{body}}})"

    def __add__(self, other: "SparseVector") -> "SparseVector":
        out = dict(self._entries)
        for i, v in other.items():
            out[i] = out.get(i, 0) + v
        return SparseVector(out)

    def __sub__(self, other: "SparseVector") -> "SparseVector":
        return self + (-other)

    def __neg__(self) -> "SparseVector":
        return SparseVector((i, -v) for i, v in self.items())

    def __mul__(self, scalar) -> "SparseVector":
        if not isinstance(scalar, (Rational, str)):
            return NotImplemented
        s = as_fraction(scalar)
        return SparseVector((i, s * v) for i, v in self.items())

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "SparseVector":
        return self * (1 / as_fraction(scalar))

    def __abs__(self) -> "SparseVector":
        return SparseVector((i, abs(v)) for i, v in self.items())

    def restrict(self, indices: Iterable[int]) -> "SparseVector":
        keep = set(indices)
        return SparseVector((i, v) for i, v in self.items() if i in keep)

    def dot(self, other: "SparseVector") -> Fraction:
        return sum((v * other[i] for i, v in self.items()), Fraction(0))

    def to_json(self) -> dict:
        return {"entries": {str(i): fmt_q(v) for i, v in self.items()}}

    @classmethod
    def from_json(cls, data: Mapping) -> "SparseVector":
        entries = data["entries"] if "entries" in data else data
        return cls((int(k), Fraction(str(v))) for k, v in entries.items())


def vector_sum(vectors: Iterable[SparseVector]) -> SparseVector:
    acc: dict[int, Fraction] = {}
    for vec in vectors:
        for i, v in vec.items():
            acc[i] = acc.get(i, 0) + v
    return SparseVector(acc)
