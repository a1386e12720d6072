"""Exact sparse linear algebra over the rationals.

Rows are ``{column: int}`` dicts. Elimination is fraction-free: a pivot row
is combined as ``p * row - c * pivot`` and every row is kept primitive
(content divided out, leading entry positive), so entries stay small
integers and no rational arithmetic is needed until the nullspace is read
off.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

SparseRow = dict  # column -> int


def to_fraction(v) -> Fraction:
    """Exact Fraction with plain int parts (gmpy2 values included)."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    return Fraction(int(v.numerator), int(v.denominator))


def _primitive(row: SparseRow) -> SparseRow:
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
        if g == 1:
            break
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g not in (0, 1):
        row = {k: v // g for k, v in row.items()}
    return row


def integer_row(row: Mapping[int, object]) -> SparseRow:
    """Clear denominators of a rational sparse row."""
    row = {k: to_fraction(v) for k, v in row.items() if v != 0}
    if not row:
        return {}
    den = 1
    for v in row.values():
        den = den * v.denominator // math.gcd(den, v.denominator)
    return _primitive({k: int(v * den) for k, v in row.items()})


def _combine(row: SparseRow, pivot: SparseRow, col: int) -> SparseRow:
    p, c = pivot[col], row[col]
    g = math.gcd(p, c)
    p, c = p // g, c // g
    out = {k: p * v for k, v in row.items()}
    for k, v in pivot.items():
        nv = out.get(k, 0) - c * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return _primitive(out) if out else out


class Echelon:
    """Incrementally maintained reduced row echelon form."""

    def __init__(self):
        self.pivots: dict[int, SparseRow] = {}

    def reduce(self, row: SparseRow) -> SparseRow:
        row = dict(row)
        while True:
            hit = next((k for k in sorted(row) if k in self.pivots), None)
            if hit is None:
                return row
            row = _combine(row, self.pivots[hit], hit)
            if not row:
                return row

    def add(self, row: Mapping[int, object]) -> bool:
        """Insert a row; returns True if it increased the rank."""
        r = self.reduce(integer_row(row))
        if not r:
            return False
        col = min(r)
        r = _primitive(r)
        for k, other in list(self.pivots.items()):
            if col in other:
                self.pivots[k] = _combine(other, r, col)
        self.pivots[col] = r
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def contains(self, row: Mapping[int, object]) -> bool:
        return not self.reduce(integer_row(row))

    def nullspace(self, ncols: int) -> list[dict[int, Fraction]]:
        """Basis of ``{v : row . v = 0 for all rows}``, one vector per free column."""
        free = [c for c in range(ncols) if c not in self.pivots]
        out = []
        for f in free:
            v = {f: Fraction(1)}
            for p, row in self.pivots.items():
                if f in row:
                    v[p] = Fraction(-row[f], row[p])
            out.append(v)
        return out


def nullspace(rows: Iterable[Mapping[int, object]], ncols: int) -> list[dict[int, Fraction]]:
    ech = Echelon()
    for r in rows:
        ech.add(r)
    return ech.nullspace(ncols)


def rank(rows: Iterable[Mapping[int, object]]) -> int:
    ech = Echelon()
    for r in rows:
        ech.add(r)
    return ech.rank


def primitive_vector(v: Mapping[int, object]) -> dict[int, int]:
    """Integer multiple of ``v`` with coprime entries and positive leading entry."""
    return integer_row(v)


def apply(rows: Sequence[Mapping[int, object]], v: Mapping[int, object]) -> dict[int, Fraction]:
    """Sparse matrix (given by rows) times sparse vector."""
    out = {}
    for i, r in enumerate(rows):
        s = sum((to_fraction(c) * to_fraction(v[k]) for k, c in r.items() if k in v), Fraction(0))
        if s:
            out[i] = s
    return out


def solve_in_span(basis: Sequence[Mapping[int, object]], target: Mapping[int, object]) -> list[Fraction] | None:
    """Exact coefficients ``c`` with ``sum c_i basis_i = target``, or None."""
    # one equation per coordinate; column m carries the target with the
    # augmented variable fixed to -1
    m = len(basis)
    keys = sorted(set().union(*[set(b) for b in basis], set(target)))
    rows = []
    for k in keys:
        r = {i: to_fraction(basis[i].get(k, 0)) for i in range(m) if basis[i].get(k, 0) != 0}
        t = to_fraction(target.get(k, 0))
        if t:
            r[m] = t
        if r:
            rows.append(r)
    ech = Echelon()
    for r in rows:
        ech.add(r)
    if m in ech.pivots:
        return None
    # free basis columns (dependent basis) are set to zero
    coeffs = [Fraction(0)] * m
    for p, row in ech.pivots.items():
        coeffs[p] = Fraction(row.get(m, 0), row[p])
    return coeffs
