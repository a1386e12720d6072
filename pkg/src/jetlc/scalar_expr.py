"""Exact scalar layer: rational expressions over first-jet coordinates.

Expressions are hash-consed DAG nodes, so two structurally identical
expressions are the same Python object. Sums are stored as linear
combinations with rational coefficients and products as power products with
integer exponents; that gives like-term collection and ``a * a**-1 == 1``
for free without any general simplifier.
"""

from __future__ import annotations

import itertools
import math
import random
import sys
import weakref
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple

from gmpy2 import mpq

from .errors import DivisionByZero, InvalidPoint, UnsupportedDimension

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

Rational = type(mpq())

SUPPORTED_DIMENSIONS = (2, 3, 4)


def Q(value, den=None) -> Rational:
    """Coerce ints, Fractions, mpq and ``"a/b"`` strings to an exact rational."""
    if den is not None:
        return mpq(value, den)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a Fraction or a string")
    return mpq(value)


def fraction_str(q) -> str:
    q = Q(q)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# coordinates

BASE, METRIC, JET = 0, 1, 2


class JetCoordinate(NamedTuple):
    """A coordinate function on the first jet bundle (indices are 0-based).

    Tuple order is the coframe order: base < metric < metric jets, then
    lexicographic on indices.
    """

    kind: int
    i: int
    j: int = -1
    k: int = -1

    @property
    def name(self) -> str:
        if self.kind == BASE:
            return f"x{self.i + 1}"
        if self.kind == METRIC:
            return f"y{self.i + 1}{self.j + 1}"
        return f"y{self.i + 1}{self.j + 1},{self.k + 1}"

    def __repr__(self):
        return self.name

    @property
    def max_index(self) -> int:
        return max(self.i, self.j, self.k)


def xc(i: int) -> JetCoordinate:
    return JetCoordinate(BASE, i)


def yc(i: int, j: int) -> JetCoordinate:
    if i > j:
        i, j = j, i
    return JetCoordinate(METRIC, i, j)


def jc(i: int, j: int, k: int) -> JetCoordinate:
    if i > j:
        i, j = j, i
    return JetCoordinate(JET, i, j, k)


def parse_coordinate(name: str) -> JetCoordinate:
    """Inverse of ``JetCoordinate.name`` (1-based indices, e.g. ``y12,3``)."""
    s = name.strip()
    try:
        if s[0] == "x":
            return xc(int(s[1:]) - 1)
        if s[0] == "y":
            if "," in s:
                pair, k = s[1:].split(",")
                return jc(int(pair[0]) - 1, int(pair[1]) - 1, int(k) - 1)
            return yc(int(s[1]) - 1, int(s[2]) - 1)
    except (ValueError, IndexError):
        pass
    raise ValueError(f"not a jet coordinate name: {name!r}")


def check_dimension(n: int) -> None:
    if n not in SUPPORTED_DIMENSIONS:
        raise UnsupportedDimension(f"dimension {n} not in {SUPPORTED_DIMENSIONS}")


@lru_cache(maxsize=None)
def coordinates(n: int) -> tuple[JetCoordinate, ...]:
    """All jet coordinates for dimension ``n`` in coframe order."""
    out = [xc(i) for i in range(n)]
    out += [yc(i, j) for i in range(n) for j in range(i, n)]
    out += [jc(i, j, k) for i in range(n) for j in range(i, n) for k in range(n)]
    return tuple(out)


def coordinate_count(n: int) -> int:
    return n + n * (n + 1) // 2 + n * n * (n + 1) // 2


# ---------------------------------------------------------------------------
# dual numbers: exact first-order directional derivatives


class Dual:
    """``a + b*eps`` with ``eps**2 = 0`` over exact rationals."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a = a
        self.b = b

    @staticmethod
    def _parts(o):
        if isinstance(o, Dual):
            return o.a, o.b
        return o, 0

    def __add__(self, o):
        a, b = self._parts(o)
        return Dual(self.a + a, self.b + b)

    __radd__ = __add__

    def __sub__(self, o):
        a, b = self._parts(o)
        return Dual(self.a - a, self.b - b)

    def __rsub__(self, o):
        a, b = self._parts(o)
        return Dual(a - self.a, b - self.b)

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __mul__(self, o):
        if isinstance(o, Dual):
            return Dual(self.a * o.a, self.a * o.b + self.b * o.a)
        return Dual(self.a * o, self.b * o)

    __rmul__ = __mul__

    def inverse(self):
        if _real(self.a) == 0:
            raise ZeroDivisionError("dual number with zero real part")
        inv = 1 / self.a if isinstance(self.a, Dual) else 1 / Q(self.a)
        return Dual(inv, -self.b * inv * inv)

    def __truediv__(self, o):
        if isinstance(o, Dual):
            return self * o.inverse()
        inv = 1 / Q(o)
        return Dual(self.a * inv, self.b * inv)

    def __rtruediv__(self, o):
        return self.inverse() * o

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return Dual(mpq(1))
        return Dual(self.a**k, k * self.a ** (k - 1) * self.b)

    def __eq__(self, o):
        a, b = self._parts(o)
        return self.a == a and self.b == b

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        return f"Dual({self.a}, {self.b})"


def is_zero_value(v) -> bool:
    if isinstance(v, Dual):
        return v.a == 0 and v.b == 0
    return v == 0


def _real(v):
    while isinstance(v, Dual):
        v = v.a
    return v


# ---------------------------------------------------------------------------
# expression DAG

CONST, COORD, SUM, PROD = "const", "coord", "sum", "prod"

_table: "weakref.WeakValueDictionary[tuple, Expr]" = weakref.WeakValueDictionary()
_serial = itertools.count()
_EMPTY = frozenset()


class Expr:
    """Interned expression node; never construct directly, use the helpers."""

    __slots__ = ("kind", "id", "args", "free", "_d", "__weakref__")

    def __add__(self, o):
        return add(self, o)

    __radd__ = __add__

    def __sub__(self, o):
        return lincomb(((1, self), (-1, as_expr(o))))

    def __rsub__(self, o):
        return lincomb(((1, as_expr(o)), (-1, self)))

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, o):
        if isinstance(o, Expr):
            return mul(self, o)
        return scale(self, Q(o))

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, Expr):
            return mul(self, power(o, -1))
        return scale(self, 1 / Q(o))

    def __rtruediv__(self, o):
        return mul(as_expr(o), power(self, -1))

    def __pow__(self, k: int):
        return power(self, k)

    def __repr__(self):
        return to_str(self, depth=6)

    @property
    def is_const(self) -> bool:
        return self.kind is CONST

    @property
    def value(self) -> Rational:
        if self.kind is not CONST:
            raise TypeError("not a constant expression")
        return self.args


def _intern(key, kind, args, free) -> Expr:
    node = _table.get(key)
    if node is None:
        node = Expr()
        node.kind = kind
        node.id = next(_serial)
        node.args = args
        node.free = free
        node._d = None
        _table[key] = node
    return node


def const(q) -> Expr:
    q = Q(q)
    return _intern((CONST, q), CONST, q, _EMPTY)


def coord(c: JetCoordinate) -> Expr:
    return _intern((COORD, c), COORD, c, frozenset((c,)))


# module-level strong references keep these alive
ZERO = const(0)
ONE = const(1)
HALF = const(Fraction(1, 2))


def as_expr(a) -> Expr:
    if isinstance(a, Expr):
        return a
    if isinstance(a, JetCoordinate):
        return coord(a)
    return const(a)


def _make_sum(c0, acc: dict) -> Expr:
    terms = [(t, c) for t, c in acc.items() if c != 0]
    if not terms:
        return const(c0)
    if c0 == 0 and len(terms) == 1 and terms[0][1] == 1:
        return terms[0][0]
    terms.sort(key=lambda tc: tc[0].id)
    key = (SUM, c0, tuple((t.id, c) for t, c in terms))
    free = frozenset().union(*(t.free for t, _ in terms))
    return _intern(key, SUM, (c0, tuple(terms)), free)


def lincomb(items: Iterable) -> Expr:
    """Sum of ``coeff * expr`` over ``(coeff, expr)`` pairs."""
    c0 = mpq(0)
    acc: dict = {}
    get = acc.get
    for c, a in items:
        if c == 0:
            continue
        a = as_expr(a)
        kind = a.kind
        if kind is CONST:
            c0 += c * a.args
        elif kind is SUM:
            s0, terms = a.args
            c0 += c * s0
            for t, tc in terms:
                acc[t] = get(t, 0) + c * tc
        else:
            acc[a] = get(a, 0) + c
    return _make_sum(c0, acc)


def add(*args) -> Expr:
    return lincomb((1, a) for a in args)


def add_all(args: Iterable) -> Expr:
    return lincomb((1, a) for a in args)


def scale(e: Expr, c) -> Expr:
    c = Q(c)
    if c == 0:
        return ZERO
    if c == 1:
        return e
    kind = e.kind
    if kind is CONST:
        return const(c * e.args)
    if kind is SUM:
        return lincomb(((c, e),))
    return _make_sum(mpq(0), {e: c})


def _monomial(e: Expr):
    """Split ``e`` as (coefficient, base) when it is a scaled single term."""
    if e.kind is SUM:
        s0, terms = e.args
        if s0 == 0 and len(terms) == 1:
            return terms[0][1], terms[0][0]
    return None


def _make_prod(fac: dict) -> Expr:
    items = [(b, k) for b, k in fac.items() if k != 0]
    if not items:
        return ONE
    if len(items) == 1 and items[0][1] == 1:
        return items[0][0]
    items.sort(key=lambda bk: bk[0].id)
    key = (PROD, tuple((b.id, k) for b, k in items))
    free = frozenset().union(*(b.free for b, _ in items))
    return _intern(key, PROD, tuple(items), free)


def _absorb(fac: dict, e: Expr, k: int) -> None:
    if e.kind is PROD:
        for b, bk in e.args:
            fac[b] = fac.get(b, 0) + bk * k
    else:
        fac[e] = fac.get(e, 0) + k


def mul(*args) -> Expr:
    coef = mpq(1)
    fac: dict = {}
    for a in args:
        a = as_expr(a)
        if a.kind is CONST:
            coef *= a.args
            continue
        m = _monomial(a)
        if m is not None:
            coef *= m[0]
            _absorb(fac, m[1], 1)
        else:
            _absorb(fac, a, 1)
    if coef == 0:
        return ZERO
    return scale(_make_prod(fac), coef)


def mul_all(args: Iterable) -> Expr:
    return mul(*args)


def power(e, k: int) -> Expr:
    e = as_expr(e)
    k = int(k)
    if k == 0:
        return ONE
    if k == 1:
        return e
    if e.kind is CONST:
        if e.args == 0 and k < 0:
            raise DivisionByZero(e)
        return const(e.args**k)
    coef = mpq(1)
    m = _monomial(e)
    if m is not None:
        coef, e = m
    fac: dict = {}
    _absorb(fac, e, k)
    return scale(_make_prod(fac), coef**k)


def quotient(num, den) -> Expr:
    return mul(num, power(den, -1))


# ---------------------------------------------------------------------------
# differentiation and substitution


def partial(e: Expr, c: JetCoordinate) -> Expr:
    """Exact partial derivative; ``y_ji`` resolves to the normalized ``y_ij``."""
    if c.kind != BASE and c.i > c.j:
        c = yc(c.i, c.j) if c.kind == METRIC else jc(c.i, c.j, c.k)
    if c not in e.free:
        return ZERO
    cache = e._d
    if cache is None:
        cache = e._d = {}
    hit = cache.get(c)
    if hit is not None:
        return hit
    kind = e.kind
    if kind is COORD:
        out = ONE
    elif kind is SUM:
        out = lincomb((tc, partial(t, c)) for t, tc in e.args[1] if c in t.free)
    else:
        pieces = []
        fac = dict(e.args)
        for b, k in e.args:
            if c not in b.free:
                continue
            fac[b] = k - 1
            pieces.append(mul(const(k), _make_prod(fac), partial(b, c)))
            fac[b] = k
        out = add_all(pieces)
    cache[c] = out
    return out


def substitute(e: Expr, mapping: Mapping[JetCoordinate, Expr], memo: dict | None = None) -> Expr:
    """Replace coordinates by expressions; unmapped coordinates stay put."""
    if memo is None:
        memo = {}
    return _subst(e, mapping, memo)


def _subst(e: Expr, mapping, memo) -> Expr:
    hit = memo.get(e.id)
    if hit is not None:
        return hit
    kind = e.kind
    if kind is CONST:
        out = e
    elif kind is COORD:
        out = as_expr(mapping.get(e.args, e))
    elif kind is SUM:
        s0, terms = e.args
        out = lincomb([(1, const(s0))] + [(tc, _subst(t, mapping, memo)) for t, tc in terms])
    else:
        out = mul(*(power(_subst(b, mapping, memo), k) for b, k in e.args))
    memo[e.id] = out
    return out


# ---------------------------------------------------------------------------
# evaluation


class Evaluator:
    """Evaluates expressions at one point, memoizing every visited node.

    ``values`` maps coordinates to exact rationals (or ``Dual`` numbers for a
    directional derivative). Share one evaluator across many expressions at
    the same point to reuse common subexpressions.
    """

    def __init__(self, values: Mapping[JetCoordinate, object]):
        self.values = values
        self.cache: dict[int, object] = {}

    def __call__(self, e: Expr):
        cache = self.cache
        hit = cache.get(e.id, None)
        if hit is not None:
            return hit
        stack = [e]
        values = self.values
        while stack:
            node = stack[-1]
            if node.id in cache:
                stack.pop()
                continue
            kind = node.kind
            if kind is CONST:
                cache[node.id] = node.args
                stack.pop()
                continue
            if kind is COORD:
                try:
                    cache[node.id] = values[node.args]
                except KeyError:
                    raise InvalidPoint(f"no value for coordinate {node.args.name}") from None
                stack.pop()
                continue
            children = node.args[1] if kind is SUM else node.args
            pending = [ch for ch, _ in children if ch.id not in cache]
            if pending:
                stack.extend(pending)
                continue
            if kind is SUM:
                val = node.args[0]
                for ch, c in children:
                    val = val + c * cache[ch.id]
            else:
                val = mpq(1)
                for ch, k in children:
                    v = cache[ch.id]
                    if k == 1:
                        val = val * v
                    elif k < 0:
                        if _real(v) == 0:
                            raise DivisionByZero(ch)
                        val = val * v**k
                    else:
                        val = val * v**k
            cache[node.id] = val
            stack.pop()
        return cache[e.id]


def evaluate(e: Expr, point) -> Rational:
    values = point.values if isinstance(point, JetPoint) else point
    return Evaluator(values)(as_expr(e))


# ---------------------------------------------------------------------------
# points


def _leading_minors_positive(m: list[list]) -> bool:
    n = len(m)
    for size in range(1, n + 1):
        if det_exact([row[:size] for row in m[:size]]) <= 0:
            return False
    return True


def det_exact(m: list[list]):
    """Determinant by exact Gaussian elimination over the entries' field."""
    a = [list(row) for row in m]
    n = len(a)
    sign = 1
    det = mpq(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if not is_zero_value(a[r][col])), None)
        if piv is None:
            return mpq(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        p = a[col][col]
        det = det * p
        for r in range(col + 1, n):
            if is_zero_value(a[r][col]):
                continue
            f = a[r][col] / p
            for c in range(col, n):
                a[r][c] = a[r][c] - f * a[col][c]
    return det * sign


def inverse_exact(m: list[list]) -> list[list]:
    """Exact Gauss-Jordan inverse; works for rationals and Dual entries."""
    n = len(m)
    a = [list(row) + [mpq(1) if i == j else mpq(0) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if _real(a[r][col]) != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and not is_zero_value(a[r][col]):
                f = a[r][col]
                a[r] = [vr - f * vc for vr, vc in zip(a[r], a[col])]
    return [row[n:] for row in a]


class JetPoint:
    """Exact values of every jet coordinate at one point, ``(y_ij)`` positive definite."""

    __slots__ = ("n", "values")

    def __init__(self, n: int, values: Mapping[JetCoordinate, object], check: bool = True):
        check_dimension(n)
        self.n = n
        vals = {}
        for c, v in values.items():
            if c.kind != BASE and c.i > c.j:
                c = yc(c.i, c.j) if c.kind == METRIC else jc(c.i, c.j, c.k)
            vals[c] = Q(v)
        for c in coordinates(n):
            vals.setdefault(c, mpq(0))
        self.values = vals
        if check and not _leading_minors_positive(self.metric()):
            raise InvalidPoint("metric block is not positive definite")

    def metric(self) -> list[list]:
        n = self.n
        return [[self.values[yc(i, j)] for j in range(n)] for i in range(n)]

    def __getitem__(self, c: JetCoordinate):
        return self.values[c]

    def replace(self, **named) -> "JetPoint":
        vals = dict(self.values)
        for name, v in named.items():
            vals[parse_coordinate(name.replace("_", ","))] = v
        return JetPoint(self.n, vals)

    def to_json(self) -> dict:
        return {c.name: fraction_str(self.values[c]) for c in coordinates(self.n)}

    @classmethod
    def from_json(cls, n: int, data: Mapping[str, str]) -> "JetPoint":
        return cls(n, {parse_coordinate(k): Q(v) for k, v in data.items()})

    def __repr__(self):
        nz = {c.name: str(v) for c, v in self.values.items() if v != 0}
        return f"JetPoint(n={self.n}, {nz})"


def normal_point(n: int, **overrides) -> JetPoint:
    """y = identity, all first jets and base coordinates zero."""
    vals = {yc(i, i): 1 for i in range(n)}
    for name, v in overrides.items():
        vals[parse_coordinate(name.replace("_", ","))] = Q(v)
    return JetPoint(n, vals)


def random_rational(rng: random.Random, lo, hi, max_den: int = 8) -> Rational:
    den = rng.randint(1, max_den)
    num = rng.randint(math.ceil(lo * den), math.floor(hi * den))
    return mpq(num, den)


def random_point(n: int, rng: random.Random) -> JetPoint:
    """y = I + symmetric perturbation in [-1/4, 1/4]; jets and x uniform in [-2, 2]."""
    while True:
        vals = {}
        for c in coordinates(n):
            if c.kind == METRIC:
                vals[c] = (1 if c.i == c.j else 0) + random_rational(rng, Fraction(-1, 4), Fraction(1, 4))
            else:
                vals[c] = random_rational(rng, -2, 2)
        try:
            return JetPoint(n, vals)
        except InvalidPoint:
            continue


def random_points(n: int, count: int, seed: int) -> list[JetPoint]:
    rng = random.Random(seed)
    return [random_point(n, rng) for _ in range(count)]


def infer_dimension(*exprs: Expr, default: int = 2) -> int:
    top = -1
    for e in exprs:
        for c in e.free:
            top = max(top, c.max_index)
    return max(default, top + 1)


# ---------------------------------------------------------------------------
# polynomial normalization and identity testing


class _TooLarge(Exception):
    pass


def to_poly(e: Expr, limit: int = 20000):
    """Expand to ``{monomial: coeff}`` or return None if ``e`` is not a polynomial.

    Monomials are sorted tuples of ``(coordinate, exponent)``. Returns None as
    well when an intermediate expansion exceeds ``limit`` terms.
    """
    memo: dict = {}
    try:
        return _poly(e, memo, limit)
    except _TooLarge:
        return None


def _poly_mul(p: dict, q: dict, limit: int) -> dict:
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            d = dict(m1)
            for v, k in m2:
                d[v] = d.get(v, 0) + k
            m = tuple(sorted(d.items()))
            out[m] = out.get(m, 0) + c1 * c2
    out = {m: c for m, c in out.items() if c != 0}
    if len(out) > limit:
        raise _TooLarge
    return out


def _poly(e: Expr, memo: dict, limit: int):
    hit = memo.get(e.id)
    if hit is not None or e.id in memo:
        return hit
    kind = e.kind
    if kind is CONST:
        out = {(): e.args} if e.args != 0 else {}
    elif kind is COORD:
        out = {((e.args, 1),): mpq(1)}
    elif kind is SUM:
        s0, terms = e.args
        out = {(): s0} if s0 != 0 else {}
        for t, c in terms:
            p = _poly(t, memo, limit)
            if p is None:
                out = None
                break
            for m, mc in p.items():
                out[m] = out.get(m, 0) + c * mc
        if out is not None:
            out = {m: c for m, c in out.items() if c != 0}
            if len(out) > limit:
                raise _TooLarge
    else:
        out = {(): mpq(1)}
        for b, k in e.args:
            if k < 0:
                out = None
                break
            p = _poly(b, memo, limit)
            if p is None:
                out = None
                break
            for _ in range(k):
                out = _poly_mul(out, p, limit)
    memo[e.id] = out
    return out


class IdentityChecker:
    """Decides ``expr == 0`` as a rational function.

    Polynomials are expanded and compared exactly. Anything else is evaluated
    at ``trials`` seeded random jet points (probabilistic identity testing:
    a nonzero rational function vanishes on a random rational point with
    small probability, and ``trials`` independent points must all vanish).
    Points are drawn once and their evaluators are shared by every check.
    """

    def __init__(self, n: int, trials: int = 20, seed: int = 0, poly_limit: int = 2000):
        if trials < 1:
            raise ValueError("trials must be >= 1")
        self.n = n
        self.trials = trials
        self.seed = seed
        self.poly_limit = poly_limit
        self._rng = random.Random(seed)
        self.points: list[JetPoint] = []
        self._evals: list[Evaluator] = []

    def _point(self, idx: int) -> Evaluator:
        while len(self.points) <= idx:
            p = random_point(self.n, self._rng)
            self.points.append(p)
            self._evals.append(Evaluator(p.values))
        return self._evals[idx]

    def witness(self, e: Expr):
        """None if ``e`` is identically zero, otherwise a point where it is not."""
        if e is ZERO:
            return None
        if e.kind is CONST:
            return normal_point(self.n)
        if self.poly_limit and len(e.free) <= 12:
            p = to_poly(e, self.poly_limit)
            if p is not None:
                return None if not p else self._nonzero_sample(e)
        return self._nonzero_sample(e)

    def _nonzero_sample(self, e: Expr):
        good = 0
        idx = 0
        skipped = 0
        while good < self.trials:
            ev = self._point(idx)
            idx += 1
            try:
                v = ev(e)
            except DivisionByZero:
                skipped += 1
                if skipped > 10 * self.trials:
                    raise
                continue
            if v != 0:
                return self.points[idx - 1]
            good += 1
        return None

    def is_zero(self, e: Expr) -> bool:
        return self.witness(e) is None

    def equal(self, a: Expr, b: Expr) -> bool:
        return self.is_zero(as_expr(a) - as_expr(b))


def equal_probabilistic(a, b, trials: int = 20, seed: int = 0, n: int | None = None) -> bool:
    """True iff ``a - b`` vanishes at ``trials`` seeded random jet points."""
    a, b = as_expr(a), as_expr(b)
    if n is None:
        n = infer_dimension(a, b)
    checker = IdentityChecker(n, trials, seed, poly_limit=0)
    return checker.witness(a - b) is None


def probabilistic_witness(e, trials: int = 20, seed: int = 0, n: int | None = None):
    e = as_expr(e)
    if n is None:
        n = infer_dimension(e)
    return IdentityChecker(n, trials, seed, poly_limit=0).witness(e)


# ---------------------------------------------------------------------------
# metric matrix and its inverse


def _perm_sign(p) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def det_expr(m: list[list[Expr]]) -> Expr:
    """Leibniz determinant of a small matrix of expressions."""
    n = len(m)
    return lincomb(
        (_perm_sign(p), mul(*(m[i][p[i]] for i in range(n)))) for p in itertools.permutations(range(n))
    )


def metric_matrix(n: int) -> list[list[Expr]]:
    check_dimension(n)
    return [[coord(yc(i, j)) for j in range(n)] for i in range(n)]


@lru_cache(maxsize=None)
def _inverse_metric(n: int):
    g = metric_matrix(n)
    det = det_expr(g)
    inv_det = power(det, -1)
    inv = []
    for i in range(n):
        row = []
        for j in range(n):
            # adjugate: (g^-1)_ij = cofactor_ji / det
            minor = [[g[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
            cof = det_expr(minor) if minor else ONE
            row.append(mul(scale(cof, (-1) ** (i + j)), inv_det))
        inv.append(tuple(row))
    return det, tuple(inv)


def inverse_metric(n: int) -> list[list[Expr]]:
    """Entries of ``(y^ij)`` as adjugate / determinant expressions."""
    check_dimension(n)
    return [list(row) for row in _inverse_metric(n)[1]]


def metric_determinant(n: int) -> Expr:
    check_dimension(n)
    return _inverse_metric(n)[0]


# ---------------------------------------------------------------------------
# printing


def to_str(e: Expr, depth: int = 8) -> str:
    kind = e.kind
    if kind is CONST:
        return str(e.args)
    if kind is COORD:
        return e.args.name
    if depth <= 0:
        return "..."
    if kind is SUM:
        s0, terms = e.args
        parts = [str(s0)] if s0 != 0 else []
        for t, c in terms:
            ts = to_str(t, depth - 1)
            parts.append(ts if c == 1 else f"{c}*{ts}")
        return "(" + " + ".join(parts) + ")"
    parts = []
    for b, k in e.args:
        bs = to_str(b, depth - 1)
        parts.append(bs if k == 1 else f"{bs}^{k}")
    return "*".join(parts)
