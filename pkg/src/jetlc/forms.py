"""Sparse exterior algebra on the first jet bundle.

A ``DiffForm`` maps strictly increasing tuples of basis covectors to
coefficients. Coefficients are symbolic ``Expr`` nodes, or plain exact
numbers once a form has been evaluated at a point. Basis covectors are
``JetCoordinate`` values (``dX < dY < dYJet``), or small integers for forms
restricted to the span of a tuple of tangent vectors; the algebra only needs
the keys to be totally ordered.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from . import scalar_expr as S
from .errors import DegreeMismatch, DimensionMismatch, NotAntisymmetric, OddDimension, OutOfRange
from .scalar_expr import Expr, JetCoordinate


def _is_zero(c) -> bool:
    if isinstance(c, Expr):
        return c is S.ZERO
    return S.is_zero_value(c)


def _sum(values: list):
    if len(values) == 1:
        return values[0]
    if any(isinstance(v, Expr) for v in values):
        return S.add_all(values)
    total = values[0]
    for v in values[1:]:
        total = total + v
    return total


def _times(a, b):
    if isinstance(a, Expr) or isinstance(b, Expr):
        return S.mul(a, b)
    return a * b


@lru_cache(maxsize=1 << 20)
def merge_keys(a: tuple, b: tuple):
    """Sign and sorted union of two increasing basis tuples, or (0, None) on overlap."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    out = []
    i = j = 0
    inversions = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        elif b[j] < a[i]:
            out.append(b[j])
            inversions += la - i
            j += 1
        else:
            return 0, None
    out.extend(a[i:])
    out.extend(b[j:])
    return (-1 if inversions & 1 else 1), tuple(out)


def basis_name(c) -> str:
    if isinstance(c, JetCoordinate):
        return "d" + c.name
    return f"e{c}"


def _finalize(degree: int, acc: dict) -> "DiffForm":
    terms = {}
    for key, vals in acc.items():
        c = _sum(vals)
        if not _is_zero(c):
            terms[key] = c
    return DiffForm(degree, terms, _clean=True)


class DiffForm:
    """Sparse exterior form of fixed degree."""

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms: Mapping | None = None, _clean: bool = False):
        self.degree = degree
        if terms is None:
            terms = {}
        elif not _clean:
            terms = {k: c for k, c in terms.items() if not _is_zero(c)}
            for k in terms:
                if len(k) != degree:
                    raise DegreeMismatch(f"key {k} in a {degree}-form")
        self.terms = terms

    # -- constructors -------------------------------------------------------

    @classmethod
    def scalar(cls, c) -> "DiffForm":
        return cls(0, {(): c})

    @classmethod
    def d(cls, c: JetCoordinate, coeff=S.ONE) -> "DiffForm":
        return cls(1, {(c,): coeff})

    @classmethod
    def basis(cls, *covectors, coeff=S.ONE) -> "DiffForm":
        form = cls.scalar(coeff)
        for c in covectors:
            form = form.wedge(cls.d(c))
        return form

    @classmethod
    def zero(cls, degree: int) -> "DiffForm":
        return cls(degree, {}, _clean=True)

    # -- algebra ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        # structural: symbolic coefficients are compared after cancellation only
        if not isinstance(other, DiffForm):
            return NotImplemented
        return self.degree == other.degree and (self - other).is_zero()

    __hash__ = None

    def _check_same(self, other: "DiffForm"):
        if self.degree != other.degree:
            raise DegreeMismatch(f"cannot add a {self.degree}-form and a {other.degree}-form")

    def __add__(self, other: "DiffForm") -> "DiffForm":
        return sum_forms([self, other])

    def __sub__(self, other: "DiffForm") -> "DiffForm":
        return sum_forms([self, other.scale(-1)])

    def __neg__(self) -> "DiffForm":
        return self.scale(-1)

    def scale(self, c) -> "DiffForm":
        if not isinstance(c, (Expr, S.Dual)):
            c = S.Q(c)
            if c == 1:
                return self
        return _finalize(self.degree, {k: [_times(c, v)] for k, v in self.terms.items()})

    def __mul__(self, c):
        if isinstance(c, DiffForm):
            return self.wedge(c)
        return self.scale(c)

    __rmul__ = scale

    def wedge(self, other: "DiffForm") -> "DiffForm":
        acc: dict = {}
        _wedge_into(acc, self, other, 1)
        return _finalize(self.degree + other.degree, acc)

    def dext(self) -> "DiffForm":
        """Exterior derivative; coefficients must be symbolic."""
        acc: dict = {}
        for key, c in self.terms.items():
            if not isinstance(c, Expr):
                raise TypeError("dext needs symbolic coefficients")
            for v in sorted(c.free):
                sign, k2 = merge_keys((v,), key)
                if k2 is None:
                    continue
                pd = S.partial(c, v)
                if pd is S.ZERO:
                    continue
                acc.setdefault(k2, []).append(pd if sign == 1 else S.scale(pd, -1))
        return _finalize(self.degree + 1, acc)

    def map_coeffs(self, f) -> "DiffForm":
        return _finalize(self.degree, {k: [f(c)] for k, c in self.terms.items()})

    # -- evaluation ---------------------------------------------------------

    def at(self, point) -> "DiffForm":
        """Numeric form: every coefficient evaluated at ``point``."""
        ev = _evaluator(point)
        return _finalize(self.degree, {k: [_value(ev, c)] for k, c in self.terms.items()})

    def evaluate(self, point, vectors: Sequence[Mapping]):
        """Value on tangent vectors given as sparse ``{covector: component}`` maps."""
        if len(vectors) != self.degree:
            raise DegreeMismatch(f"{self.degree}-form evaluated on {len(vectors)} vectors")
        ev = _evaluator(point) if point is not None else None
        total = mpq(0)
        for key, c in self.terms.items():
            m = [[v.get(b, 0) for v in vectors] for b in key]
            if any(all(S.is_zero_value(x) for x in row) for row in m):
                continue
            det = S.det_exact(m) if m else mpq(1)
            if S.is_zero_value(det):
                continue
            coef = _value(ev, c) if ev is not None else c
            total = total + coef * det
        if isinstance(total, Expr) and total.is_const:
            return total.value
        return total

    def restrict(self, point, vectors: Sequence[Mapping], minors: dict | None = None) -> "DiffForm":
        """Pull back to R^m along the linear map sending e_s to ``vectors[s]``.

        The result has integer basis labels ``0..m-1`` and numeric
        coefficients. Restriction commutes with wedge, so high-degree wedge
        products can be evaluated without ever building them symbolically.
        ``minors`` caches the per-key minors across forms restricted to the
        same vectors.
        """
        ev = _evaluator(point) if point is not None else None
        if minors is None:
            minors = {}
        acc: dict = {}
        for key, c in self.terms.items():
            mk = minors.get(key)
            if mk is None:
                mk = minors[key] = _key_minors(key, vectors)
            if not mk:
                continue
            coef = _value(ev, c) if ev is not None else c
            for subset, det in mk:
                acc.setdefault(subset, []).append(coef * det)
        return _finalize(self.degree, acc)

    def top_value(self):
        """Coefficient of e_0 ^ ... ^ e_{p-1} for a restricted form."""
        return self.terms.get(tuple(range(self.degree)), mpq(0))

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        terms = {}
        for key in sorted(self.terms):
            c = self.terms[key]
            if isinstance(c, Expr):
                if not c.is_const:
                    raise TypeError("only numeric forms serialize; evaluate with .at(point) first")
                c = c.value
            terms["^".join(basis_name(b) for b in key) or "1"] = S.fraction_str(c)
        return {"degree": self.degree, "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping) -> "DiffForm":
        terms = {}
        for name, val in data["terms"].items():
            if name == "1":
                key = ()
            else:
                key = tuple(S.parse_coordinate(part[1:]) for part in name.split("^"))
            terms[key] = S.Q(val)
        return cls(int(data["degree"]), terms)

    def __repr__(self):
        items = list(sorted(self.terms.items()))[:6]
        body = ", ".join(f"{'^'.join(basis_name(b) for b in k) or '1'}: {c!r}" for k, c in items)
        more = "" if len(self.terms) <= 6 else f", ... ({len(self.terms)} terms)"
        return f"DiffForm[{self.degree}]({body}{more})"


def _evaluator(point):
    if point is None or isinstance(point, S.Evaluator):
        return point
    if isinstance(point, S.JetPoint):
        return S.Evaluator(point.values)
    return S.Evaluator(point)


def _value(ev, c):
    if isinstance(c, Expr):
        return ev(c)
    return c


def _key_minors(key: tuple, vectors: Sequence[Mapping]) -> list:
    """Nonzero minors ``(subset, det)`` of the component matrix of ``key`` on ``vectors``."""
    m, p = len(vectors), len(key)
    rows = [[v.get(b, 0) for v in vectors] for b in key]
    if any(all(S.is_zero_value(x) for x in row) for row in rows):
        return []
    out = []
    if p == 0:
        return [((), mpq(1))]
    if p == 1:
        return [((s,), x) for s, x in enumerate(rows[0]) if not S.is_zero_value(x)]
    if p == 2:
        r0, r1 = rows
        for s in range(m):
            for t in range(s + 1, m):
                det = r0[s] * r1[t] - r0[t] * r1[s]
                if not S.is_zero_value(det):
                    out.append(((s, t), det))
        return out
    for subset in itertools.combinations(range(m), p):
        det = S.det_exact([[row[s] for s in subset] for row in rows])
        if not S.is_zero_value(det):
            out.append((subset, det))
    return out


def _wedge_into(acc: dict, a: DiffForm, b: DiffForm, factor) -> None:
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            sign, key = merge_keys(ka, kb)
            if key is None:
                continue
            c = _times(ca, cb)
            if sign * factor != 1:
                c = _times(sign * factor, c)
            acc.setdefault(key, []).append(c)


def wedge(*forms: DiffForm) -> DiffForm:
    out = forms[0]
    for f in forms[1:]:
        out = out.wedge(f)
    return out


def dext(a: DiffForm) -> DiffForm:
    return a.dext()


def sum_forms(forms: Iterable[DiffForm], degree: int | None = None) -> DiffForm:
    acc: dict = {}
    for f in forms:
        if degree is None:
            degree = f.degree
        elif f.degree != degree:
            raise DegreeMismatch(f"cannot add a {degree}-form and a {f.degree}-form")
        for k, c in f.terms.items():
            acc.setdefault(k, []).append(c)
    return _finalize(degree or 0, acc)


def evaluate(a: DiffForm, point, vectors: Sequence[Mapping]):
    return a.evaluate(point, vectors)


def form_witness(a: DiffForm, b: DiffForm, checker: "S.IdentityChecker"):
    """None if ``a == b`` coefficientwise, else ``(key, point)`` of a difference."""
    diff = a - b
    for key in sorted(diff.terms):
        c = diff.terms[key]
        if isinstance(c, Expr):
            w = checker.witness(c)
            if w is not None:
                return key, w
        elif not S.is_zero_value(c):
            return key, None
    return None


# ---------------------------------------------------------------------------
# matrix-valued forms


class MatrixForm:
    """n x n forms of one degree; entry ``[i][j]`` is row i (upper index), column j."""

    __slots__ = ("n", "degree", "entries")

    def __init__(self, entries: Sequence[Sequence[DiffForm]], degree: int | None = None):
        rows = [list(r) for r in entries]
        self.n = len(rows)
        if any(len(r) != self.n for r in rows):
            raise DimensionMismatch("matrix forms must be square")
        if degree is None:
            degree = rows[0][0].degree if self.n else 0
        for r in rows:
            for f in r:
                if f.degree != degree:
                    raise DegreeMismatch("entries of a matrix form must share a degree")
        self.degree = degree
        self.entries = tuple(tuple(r) for r in rows)

    def __getitem__(self, ij) -> DiffForm:
        i, j = ij
        return self.entries[i][j]

    @classmethod
    def zero(cls, n: int, degree: int) -> "MatrixForm":
        z = DiffForm.zero(degree)
        return cls([[z] * n for _ in range(n)], degree)

    @classmethod
    def from_scalars(cls, m: Sequence[Sequence]) -> "MatrixForm":
        return cls([[DiffForm.scalar(S.as_expr(c)) for c in row] for row in m], 0)

    @classmethod
    def identity(cls, n: int) -> "MatrixForm":
        return cls.from_scalars([[S.ONE if i == j else S.ZERO for j in range(n)] for i in range(n)])

    def _check(self, other: "MatrixForm"):
        if self.n != other.n:
            raise DimensionMismatch(f"{self.n}x{self.n} vs {other.n}x{other.n}")

    def __add__(self, other: "MatrixForm") -> "MatrixForm":
        self._check(other)
        return MatrixForm([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other: "MatrixForm") -> "MatrixForm":
        self._check(other)
        return MatrixForm([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def __neg__(self) -> "MatrixForm":
        return self.scale(-1)

    def scale(self, c) -> "MatrixForm":
        return MatrixForm([[f.scale(c) for f in row] for row in self.entries], self.degree)

    def map(self, f) -> "MatrixForm":
        return MatrixForm([[f(e) for e in row] for row in self.entries])

    @property
    def T(self) -> "MatrixForm":
        n = self.n
        return MatrixForm([[self.entries[j][i] for j in range(n)] for i in range(n)], self.degree)

    def trace(self) -> DiffForm:
        return sum_forms([self.entries[i][i] for i in range(self.n)], self.degree)

    def dext(self) -> "MatrixForm":
        return self.map(DiffForm.dext)

    def at(self, point) -> "MatrixForm":
        ev = _evaluator(point)
        return self.map(lambda f: f.at(ev))

    def restrict(self, point, vectors) -> "MatrixForm":
        ev = _evaluator(point)
        minors: dict = {}
        return self.map(lambda f: f.restrict(ev, vectors, minors))

    def is_zero(self) -> bool:
        return all(f.is_zero() for row in self.entries for f in row)

    def __eq__(self, other):
        if not isinstance(other, MatrixForm):
            return NotImplemented
        return self.n == other.n and self.degree == other.degree and (self - other).is_zero()

    __hash__ = None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "degree": self.degree,
            "entries": [[f.to_json()["terms"] for f in row] for row in self.entries],
        }

    def __repr__(self):
        return f"MatrixForm(n={self.n}, degree={self.degree})"


# T*M (x) T*M valued forms share the storage layout; both indices are lowered.
BilinearValuedForm = MatrixForm


def mat_wedge(a: MatrixForm, b: MatrixForm) -> MatrixForm:
    """(A ^ B)^i_j = sum_a A^i_a ^ B^a_j."""
    if a.n != b.n:
        raise DimensionMismatch(f"{a.n}x{a.n} vs {b.n}x{b.n}")
    n = a.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc: dict = {}
            for k in range(n):
                _wedge_into(acc, a.entries[i][k], b.entries[k][j], 1)
            row.append(_finalize(a.degree + b.degree, acc))
        rows.append(row)
    return MatrixForm(rows, a.degree + b.degree)


def left_mul(m: Sequence[Sequence], a: MatrixForm) -> MatrixForm:
    """Scalar matrix times matrix form: (M A)_ij = sum_k M_ik A_kj."""
    n = a.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc: dict = {}
            for k in range(n):
                s = m[i][k]
                if _is_zero(s):
                    continue
                for key, c in a.entries[k][j].terms.items():
                    acc.setdefault(key, []).append(_times(s, c))
            row.append(_finalize(a.degree, acc))
        rows.append(row)
    return MatrixForm(rows, a.degree)


def right_mul(a: MatrixForm, m: Sequence[Sequence]) -> MatrixForm:
    """Matrix form times scalar matrix: (A M)_ij = sum_k A_ik M_kj."""
    n = a.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc: dict = {}
            for k in range(n):
                s = m[k][j]
                if _is_zero(s):
                    continue
                for key, c in a.entries[i][k].terms.items():
                    acc.setdefault(key, []).append(_times(c, s))
            row.append(_finalize(a.degree, acc))
        rows.append(row)
    return MatrixForm(rows, a.degree)


def transpose_g(a: MatrixForm, g, g_inv) -> MatrixForm:
    """g-adjoint g^-1 A^T g."""
    return left_mul(g_inv, right_mul(a.T, g))


def sym_part(a: MatrixForm, g, g_inv) -> MatrixForm:
    return (a + transpose_g(a, g, g_inv)).scale(S.Q("1/2"))


def antisym_part(a: MatrixForm, g, g_inv) -> MatrixForm:
    return (a - transpose_g(a, g, g_inv)).scale(S.Q("1/2"))


def matrix_witness(a: MatrixForm, b: MatrixForm, checker: "S.IdentityChecker"):
    """None if equal entrywise, else ``((i, j), key, point)``."""
    for i in range(a.n):
        for j in range(a.n):
            w = form_witness(a.entries[i][j], b.entries[i][j], checker)
            if w is not None:
                return (i, j), w[0], w[1]
    return None


# ---------------------------------------------------------------------------
# Pfaffian and characteristic coefficients (entries of even degree commute)


def _entries(a) -> list[list[DiffForm]]:
    return [list(r) for r in (a.entries if isinstance(a, MatrixForm) else a)]


def _one_like(f: DiffForm) -> DiffForm:
    c = next(iter(f.terms.values()), None)
    if c is None or isinstance(c, Expr):
        return DiffForm.scalar(S.ONE)
    return DiffForm.scalar(mpq(1))


def _check_even(m: list[list[DiffForm]]):
    for row in m:
        for f in row:
            if f.degree % 2:
                raise DegreeMismatch("entries must have even degree")


def pfaffian(a, checker: "S.IdentityChecker | None" = None) -> DiffForm:
    """Sum over perfect matchings with matching sign, products taken with wedge.

    The matrix must be antisymmetric; with symbolic entries the check is
    structural first and falls back to ``checker`` (identity testing).
    """
    m = _entries(a)
    n = len(m)
    if n % 2:
        raise OddDimension(f"Pfaffian of a {n}x{n} matrix")
    _check_even(m)
    for i in range(n):
        for j in range(i, n):
            s = m[i][j] + m[j][i]
            if s.is_zero():
                continue
            if checker is not None and all(isinstance(c, Expr) for c in s.terms.values()):
                if form_witness(s, DiffForm.zero(s.degree), checker) is None:
                    continue
            raise NotAntisymmetric(f"entries ({i},{j}) and ({j},{i}) are not opposite")
    if n == 0:
        return DiffForm.scalar(S.ONE)
    one = _one_like(next((f for row in m for f in row if f.terms), m[0][0]))
    memo: dict = {}

    def pf(idx: tuple) -> DiffForm:
        if not idx:
            return one
        if idx in memo:
            return memo[idx]
        i0 = idx[0]
        acc: dict = {}
        for t in range(1, len(idx)):
            rest = idx[1:t] + idx[t + 1 :]
            _wedge_into(acc, m[i0][idx[t]], pf(rest), -1 if (t - 1) % 2 else 1)
        out = _finalize(m[0][0].degree * (len(idx) // 2), acc)
        memo[idx] = out
        return out

    return pf(tuple(range(n)))


def wedge_det(a, rows: Sequence[int] | None = None) -> DiffForm:
    """Leibniz determinant of the principal submatrix on ``rows`` (commuting entries)."""
    m = _entries(a)
    _check_even(m)
    idx = list(range(len(m))) if rows is None else list(rows)
    k = len(idx)
    if k == 0:
        return _one_like(m[0][0])
    degree = m[0][0].degree * k
    acc: dict = {}
    for perm in itertools.permutations(range(k)):
        sign = S._perm_sign(perm)
        prod = m[idx[0]][idx[perm[0]]]
        for r in range(1, k):
            if prod.is_zero():
                break
            prod = prod.wedge(m[idx[r]][idx[perm[r]]])
        for key, c in prod.terms.items():
            acc.setdefault(key, []).append(c if sign == 1 else _times(-1, c))
    return _finalize(degree, acc)


@dataclass(frozen=True)
class PrefactoredForm:
    """``(2*pi)**two_pi_power * form`` with the transcendental factor kept symbolic."""

    two_pi_power: int
    form: DiffForm

    def wedge(self, other: "PrefactoredForm") -> "PrefactoredForm":
        return PrefactoredForm(self.two_pi_power + other.two_pi_power, self.form.wedge(other.form))

    def __add__(self, other: "PrefactoredForm") -> "PrefactoredForm":
        if self.two_pi_power != other.two_pi_power:
            raise ValueError("cannot add forms with different (2 pi) prefactors")
        return PrefactoredForm(self.two_pi_power, self.form + other.form)

    @property
    def rational_part(self) -> DiffForm:
        return self.form


def char_coeff(k: int, a) -> PrefactoredForm:
    """Coefficient of lambda^(n-2k) in det(lambda I - A / 2 pi) for 2-form entries.

    Equals (2 pi)^(-2k) times the sum of the principal 2k x 2k wedge-minors.
    """
    m = _entries(a)
    n = len(m)
    if k < 0 or 2 * k > n:
        raise OutOfRange(f"2k = {2 * k} exceeds n = {n}")
    for row in m:
        for f in row:
            if f.degree != 2:
                raise DegreeMismatch("char_coeff expects 2-form entries")
    if k == 0:
        return PrefactoredForm(0, _one_like(m[0][0]))
    minors = [wedge_det(m, rows) for rows in itertools.combinations(range(n), 2 * k)]
    return PrefactoredForm(-2 * k, sum_forms(minors, 4 * k))
