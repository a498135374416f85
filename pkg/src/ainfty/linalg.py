"""Small exact linear algebra over Q on sparse vectors (dict index -> Fraction).

Everything is deterministic: the pivot order is an explicit column order.
``"lex"`` walks columns ascending, ``"revlex"`` descending.  Free variables
of a solve are always set to zero.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

PIVOT_RULES = ("lex", "revlex")

Vec = dict


def column_order(ncols: int, rule: str = "lex") -> list:
    if rule == "lex":
        return list(range(ncols))
    if rule == "revlex":
        return list(range(ncols - 1, -1, -1))
    raise ValueError(f"unknown pivot rule {rule!r}; choose from {PIVOT_RULES}")


def vadd(a: Vec, b: Vec, c: Fraction = Fraction(1)) -> Vec:
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, 0) + c * v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def vscale(a: Vec, c) -> Vec:
    if c == 0:
        return {}
    return {k: v * c for k, v in a.items()}


class Echelon:
    """Incrementally built echelon basis of a subspace of Q^N.

    Rows are kept fully reduced against one another; the pivot of a new row
    is its smallest coordinate.
    """

    def __init__(self):
        self.rows: list = []   # (pivot, vec)

    def reduce(self, v: Vec) -> Vec:
        v = dict(v)
        for piv, row in self.rows:
            c = v.get(piv)
            if c:
                v = vadd(v, row, -c)
        return v

    def add(self, v: Vec) -> bool:
        r = self.reduce(v)
        if not r:
            return False
        piv = min(r)
        r = vscale(r, Fraction(1) / r[piv])
        new_rows = []
        for p, row in self.rows:
            c = row.get(piv)
            new_rows.append((p, vadd(row, r, -c) if c else row))
        new_rows.append((piv, r))
        self.rows = new_rows
        return True

    def contains(self, v: Vec) -> bool:
        return not self.reduce(v)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def basis(self) -> list:
        return [row for _, row in self.rows]


def rank(vectors: Iterable[Vec]) -> int:
    e = Echelon()
    for v in vectors:
        e.add(v)
    return e.dim


def span_basis(vectors: Iterable[Vec]) -> list:
    e = Echelon()
    for v in vectors:
        e.add(v)
    return e.basis()


def solve(columns: Sequence[Vec], target: Vec, rule: str = "lex"):
    """Find x with Σ x_j columns[j] = target, or None if inconsistent.

    Columns are visited in the pivot-rule order; a column becomes a pivot
    iff it is independent of the earlier visited ones, and non-pivot
    (free) columns get coefficient zero.
    """
    order = column_order(len(columns), rule)
    # Echelon on row space of [col | id] tracks combinations.
    basis: list = []  # (pivot_row_index, reduced column, combination)
    for j in order:
        col = dict(columns[j])
        comb = {j: Fraction(1)}
        for piv, bcol, bcomb in basis:
            c = col.get(piv)
            if c:
                col = vadd(col, bcol, -c)
                comb = vadd(comb, bcomb, -c)
        if not col:
            continue
        piv = min(col)
        inv = Fraction(1) / col[piv]
        col = vscale(col, inv)
        comb = vscale(comb, inv)
        basis.append((piv, col, comb))
    t = dict(target)
    x: dict = {}
    for piv, bcol, bcomb in basis:
        c = t.get(piv)
        if c:
            t = vadd(t, bcol, -c)
            x = vadd(x, bcomb, c)
    if t:
        return None
    return x


def residual(columns: Sequence[Vec], target: Vec) -> Vec:
    """Reduction of target modulo the column span (a cokernel representative)."""
    e = Echelon()
    for c in columns:
        e.add(c)
    return e.reduce(target)


def kernel(columns: Sequence[Vec], rule: str = "lex") -> list:
    """Basis of {x : Σ x_j columns[j] = 0}, one vector per dependent column."""
    order = column_order(len(columns), rule)
    basis: list = []
    out = []
    for j in order:
        col = dict(columns[j])
        comb = {j: Fraction(1)}
        for piv, bcol, bcomb in basis:
            c = col.get(piv)
            if c:
                col = vadd(col, bcol, -c)
                comb = vadd(comb, bcomb, -c)
        if not col:
            out.append(comb)
            continue
        piv = min(col)
        inv = Fraction(1) / col[piv]
        basis.append((piv, vscale(col, inv), vscale(comb, inv)))
    return out


def apply(columns: Sequence[Vec], x: Vec) -> Vec:
    out: dict = {}
    for j, c in x.items():
        out = vadd(out, columns[j], c)
    return out


def coordinates(basis: Sequence[Vec], v: Vec):
    """Coefficients of v in the (independent) list ``basis``; None if outside the span."""
    return solve(basis, v, "lex")
