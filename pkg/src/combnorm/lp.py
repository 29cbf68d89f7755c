"""Small dense linear programs over the rationals.

Two-phase tableau simplex with Bland's rule, so degenerate problems cannot
cycle.  Intended for the packing/covering programs of :mod:`combnorm.duality`
(tens of rows and columns), not as a general LP engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .vector import fmt_q

RELATIONS = ("<=", ">=", "==")


@dataclass
class LinearProgram:
    """``sense`` of ``objective . x`` subject to ``row . x rel rhs``.

    ``nonneg[j]`` false makes variable ``j`` free; by default all are >= 0.
    """

    objective: list
    constraints: list = field(default_factory=list)
    sense: str = "max"
    nonneg: list | None = None

    def __post_init__(self):
        n = len(self.objective)
        self.objective = [Fraction(c) for c in self.objective]
        rows = []
        for row, rel, rhs in self.constraints:
            if len(row) != n:
                raise ValueError(f"constraint has {len(row)} coefficients, expected {n}")
            if rel not in RELATIONS:
                raise ValueError(f"unknown relation {rel!r}")
            rows.append(([Fraction(a) for a in row], rel, Fraction(rhs)))
        self.constraints = rows
        if self.sense not in ("max", "min"):
            raise ValueError("sense must be 'max' or 'min'")
        if self.nonneg is None:
            self.nonneg = [True] * n
        elif len(self.nonneg) != n:
            raise ValueError("nonneg flags do not match the number of variables")

    def to_json(self) -> dict:
        return {
            "sense": self.sense,
            "objective": [fmt_q(c) for c in self.objective],
            "constraints": [
                {"row": [fmt_q(a) for a in row], "rel": rel, "rhs": fmt_q(rhs)}
                for row, rel, rhs in self.constraints
            ],
            "nonneg": list(self.nonneg),
        }

    @classmethod
    def from_json(cls, data) -> "LinearProgram":
        return cls(
            objective=[Fraction(c) for c in data["objective"]],
            constraints=[([Fraction(a) for a in c["row"]], c["rel"], Fraction(c["rhs"]))
                         for c in data["constraints"]],
            sense=data.get("sense", "max"),
            nonneg=data.get("nonneg"),
        )


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    x: list | None = None

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "value": None if self.value is None else fmt_q(self.value),
            "x": None if self.x is None else [fmt_q(v) for v in self.x],
        }


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], basis: list[int], ncols: int):
        self.rows = rows  # each row: ncols coefficients followed by rhs
        self.basis = basis
        self.ncols = ncols
        self.obj: list[Fraction] = []

    def set_cost(self, cost: Sequence[Fraction]) -> None:
        obj = list(cost) + [Fraction(0)]
        for r, b in zip(self.rows, self.basis):
            cb = cost[b]
            if cb:
                obj = [o - cb * a for o, a in zip(obj, r)]
        self.obj = obj

    def pivot(self, r: int, c: int) -> None:
        piv = self.rows[r][c]
        row = [a / piv if a else a for a in self.rows[r]]
        self.rows[r] = row
        # tableau rows are mostly zero; only touch the pivot row's nonzeros
        nz = [(k, b) for k, b in enumerate(row) if b]
        for i, other in enumerate(self.rows):
            if i != r and other[c]:
                f = other[c]
                other = other[:]
                for k, b in nz:
                    other[k] -= f * b
                self.rows[i] = other
        if self.obj[c]:
            f = self.obj[c]
            for k, b in nz:
                self.obj[k] -= f * b
        self.basis[r] = c

    def run(self, allowed: Sequence[bool]) -> str:
        """Minimise the current cost; Bland's smallest-index rule."""
        while True:
            enter = next((j for j in range(self.ncols) if allowed[j] and self.obj[j] < 0), None)
            if enter is None:
                return "optimal"
            leave = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    key = (row[-1] / a, self.basis[i])
                    if leave is None or key < leave[0]:
                        leave = (key, i)
            if leave is None:
                return "unbounded"
            self.pivot(leave[1], enter)

    def solution(self) -> list[Fraction]:
        x = [Fraction(0)] * self.ncols
        for r, b in zip(self.rows, self.basis):
            x[b] = r[-1]
        return x


def solve_lp(p: LinearProgram) -> LPResult:
    """Exact optimum of ``p`` at a basic solution, or an infeasible/unbounded status."""
    # column layout: structural (free vars split in two), slacks/surpluses, artificials
    cols: list[tuple[int, int]] = []
    for j, nn in enumerate(p.nonneg):
        cols.append((j, 1))
        if not nn:
            cols.append((j, -1))
    nstruct = len(cols)
    prepared = []
    for row, rel, rhs in p.constraints:
        expanded = [row[j] * s for j, s in cols]
        if rhs < 0:
            expanded = [-a for a in expanded]
            rhs = -rhs
            rel = {"<=": ">=", ">=": "<=", "==": "=="}[rel]
        prepared.append((expanded, rel, rhs))
    nslack = sum(1 for _, rel, _ in prepared if rel != "==")
    nart = sum(1 for _, rel, _ in prepared if rel != "<=")
    ncols = nstruct + nslack + nart
    rows, basis = [], []
    s_at, a_at = nstruct, nstruct + nslack
    for expanded, rel, rhs in prepared:
        r = expanded + [Fraction(0)] * (nslack + nart) + [rhs]
        if rel == "<=":
            r[s_at] = Fraction(1)
            basis.append(s_at)
            s_at += 1
        else:
            if rel == ">=":
                r[s_at] = Fraction(-1)
                s_at += 1
            r[a_at] = Fraction(1)
            basis.append(a_at)
            a_at += 1
        rows.append(r)
    tab = _Tableau(rows, basis, ncols)
    is_art = [j >= nstruct + nslack for j in range(ncols)]

    if nart:
        tab.set_cost([Fraction(int(a)) for a in is_art])
        tab.run([True] * ncols)
        if -tab.obj[-1] > 0:
            return LPResult("infeasible")
        # drive zero-level artificials out of the basis, dropping redundant rows
        i = 0
        while i < len(tab.rows):
            if is_art[tab.basis[i]]:
                c = next((j for j in range(ncols) if not is_art[j] and tab.rows[i][j]), None)
                if c is None:
                    del tab.rows[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, c)
            i += 1

    sign = -1 if p.sense == "max" else 1
    cost = [sign * p.objective[j] * s for j, s in cols] + [Fraction(0)] * (nslack + nart)
    tab.set_cost(cost)
    status = tab.run([not a for a in is_art])
    if status == "unbounded":
        return LPResult("unbounded")
    sol = tab.solution()
    x = [Fraction(0)] * len(p.objective)
    for k, (j, s) in enumerate(cols):
        x[j] += s * sol[k]
    value = sum((c * v for c, v in zip(p.objective, x)), Fraction(0))
    return LPResult("optimal", value, x)
