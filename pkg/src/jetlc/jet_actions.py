"""Diffeomorphisms, scalings and sections acting on the first jet bundle of metrics.

A diffeomorphism is a chart-level polynomial map together with an exact
polynomial inverse. Its first-jet prolongation is a coordinate substitution,
and pulling a form back means substituting into the coefficients and
replacing every ``dc`` by ``d(c o prolongation)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import scalar_expr as S
from .errors import InvalidInverse, NonpositiveScale, SingularMetric
from .forms import DiffForm, MatrixForm, left_mul, right_mul, sum_forms
from .scalar_expr import BASE, JET, METRIC, Dual, Expr, coord, jc, xc, yc

Substitution = Mapping[S.JetCoordinate, Expr]

MAX_DEGREE = 3
SAMPLE_POINTS = 20


# ---------------------------------------------------------------------------
# polynomials in the base coordinates


def poly_degree(e: Expr) -> int:
    p = S.to_poly(e)
    return max((sum(k for _, k in mono) for mono in p), default=0)


def base_polynomial(table: Mapping[str, str] | Sequence, n: int) -> Expr:
    """Polynomial from an exponent table ``{"1,0": "1/2", ...}`` over ``x1..xn``.

    A list of ``[exponents, coefficient]`` pairs is accepted too.
    """
    items = table.items() if isinstance(table, Mapping) else table
    terms = []
    for exps, c in items:
        if isinstance(exps, str):
            exps = [int(t) for t in exps.replace("(", "").replace(")", "").split(",") if t.strip()]
        exps = list(exps)
        if len(exps) != n or any(e < 0 for e in exps):
            raise ValueError(f"exponent tuple {exps} does not fit dimension {n}")
        mono = S.mul_all(S.power(coord(xc(i)), e) for i, e in enumerate(exps) if e)
        terms.append(S.scale(mono, S.Q(c)))
    return S.add_all(terms)


def polynomial_table(e: Expr, n: int) -> dict[str, str]:
    p = S.to_poly(e)
    out = {}
    for mono, c in sorted(p.items(), key=lambda kv: sorted(kv[0])):
        exps = [0] * n
        for v, k in mono:
            if v.kind != BASE:
                raise ValueError("not a polynomial in the base coordinates")
            exps[v.i] = k
        out[",".join(map(str, exps))] = S.fraction_str(c)
    return out


def _base_values(n: int, x) -> dict:
    if isinstance(x, Mapping):
        return {c: (v if isinstance(v, Dual) else S.Q(v)) for c, v in x.items()}
    return {xc(i): (v if isinstance(v, Dual) else S.Q(v)) for i, v in enumerate(x)}


def _sample_base_points(n: int, count: int, seed: int = 0) -> list[dict]:
    rng = random.Random(seed)
    return [{xc(i): S.random_rational(rng, -2, 2) for i in range(n)} for _ in range(count)]


def jacobian(maps: Sequence[Expr]) -> list[list[Expr]]:
    """``J[a][i] = d maps[a] / d x^i``."""
    n = len(maps)
    return [[S.partial(maps[a], xc(i)) for i in range(n)] for a in range(n)]


def hessian(maps: Sequence[Expr]) -> list[list[list[Expr]]]:
    n = len(maps)
    return [[[S.partial(S.partial(maps[a], xc(i)), xc(k)) for k in range(n)] for i in range(n)] for a in range(n)]


def compose_maps(outer: Sequence[Expr], inner: Sequence[Expr]) -> tuple[Expr, ...]:
    """``outer o inner``."""
    sub = {xc(i): inner[i] for i in range(len(inner))}
    memo: dict = {}
    return tuple(S.substitute(e, sub, memo) for e in outer)


# ---------------------------------------------------------------------------
# diffeomorphisms


@dataclass(frozen=True, eq=False)
class PolyDiffeo:
    """Polynomial chart map with an exact polynomial inverse (degree <= 3)."""

    forward: tuple[Expr, ...]
    inverse: tuple[Expr, ...]
    name: str = "phi"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "forward", tuple(S.as_expr(e) for e in self.forward))
        object.__setattr__(self, "inverse", tuple(S.as_expr(e) for e in self.inverse))
        n = len(self.forward)
        S.check_dimension(n)
        if len(self.inverse) != n:
            raise InvalidInverse("forward and inverse have different lengths")
        for e in self.forward + self.inverse:
            if any(c.kind != BASE or c.i >= n for c in e.free):
                raise InvalidInverse("components must be polynomials in x1..xn")
            if poly_degree(e) > MAX_DEGREE:
                raise InvalidInverse(f"polynomial degree exceeds {MAX_DEGREE}")
        self._validate()

    @property
    def n(self) -> int:
        return len(self.forward)

    def _validate(self):
        n = self.n
        fi = compose_maps(self.forward, self.inverse)
        inf = compose_maps(self.inverse, self.forward)
        jf, ji = jacobian(self.forward), jacobian(self.inverse)
        hf, hi = hessian(self.forward), hessian(self.inverse)
        for pt in _sample_base_points(n, SAMPLE_POINTS, seed=7):
            ev = S.Evaluator(pt)
            for i in range(n):
                if ev(fi[i]) != pt[xc(i)] or ev(inf[i]) != pt[xc(i)]:
                    raise InvalidInverse(f"{self.name}: composition is not the identity at {pt}")
            # D(phi)(psi(z)) D(psi)(z) = I and the second-order chain rule
            # sum_a d2phi^r/dadb (Dpsi)^a_i (Dpsi)^b_k + dphi^r/da d2psi^a/didk = 0
            img = {xc(a): ev(self.inverse[a]) for a in range(n)}
            ev_img = S.Evaluator(img)
            A = [[ev_img(jf[r][a]) for a in range(n)] for r in range(n)]
            B = [[ev(ji[a][i]) for i in range(n)] for a in range(n)]
            for r in range(n):
                for i in range(n):
                    if sum(A[r][a] * B[a][i] for a in range(n)) != (1 if r == i else 0):
                        raise InvalidInverse(f"{self.name}: Jacobians are not inverse at {pt}")
                    for k in range(n):
                        second = sum(
                            ev_img(hf[r][a][b]) * B[a][i] * B[b][k] for a in range(n) for b in range(n)
                        ) + sum(A[r][a] * ev(hi[a][i][k]) for a in range(n))
                        if second != 0:
                            raise InvalidInverse(f"{self.name}: second-order chain rule fails at {pt}")

    def __call__(self, x):
        ev = S.Evaluator(_base_values(self.n, x))
        return [ev(e) for e in self.forward]

    def compose(self, other: "PolyDiffeo") -> "PolyDiffeo":
        """``self o other``."""
        return PolyDiffeo(
            compose_maps(self.forward, other.forward),
            compose_maps(other.inverse, self.inverse),
            f"{self.name}.{other.name}",
        )

    def inverted(self) -> "PolyDiffeo":
        return PolyDiffeo(self.inverse, self.forward, f"{self.name}^-1")

    def jacobian(self) -> list[list[Expr]]:
        if "J" not in self._cache:
            self._cache["J"] = jacobian(self.forward)
        return self._cache["J"]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "forward": [polynomial_table(e, self.n) for e in self.forward],
            "inverse": [polynomial_table(e, self.n) for e in self.inverse],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PolyDiffeo":
        n = len(data["forward"])
        return cls(
            tuple(base_polynomial(t, n) for t in data["forward"]),
            tuple(base_polynomial(t, n) for t in data["inverse"]),
            data.get("name", "phi"),
        )


def identity_diffeo(n: int) -> PolyDiffeo:
    xs = tuple(coord(xc(i)) for i in range(n))
    return PolyDiffeo(xs, xs, "id")


def affine_diffeo(A: Sequence[Sequence], b: Sequence | None = None, name: str = "affine") -> PolyDiffeo:
    """x -> A x + b with rational A."""
    n = len(A)
    A = [[S.Q(v) for v in row] for row in A]
    b = [S.Q(v) for v in (b or [0] * n)]
    if S.det_exact(A) == 0:
        raise InvalidInverse("singular linear part")
    Ainv = S.inverse_exact(A)
    xs = [coord(xc(i)) for i in range(n)]
    fwd = tuple(S.add_all([S.const(b[i])] + [S.scale(xs[j], A[i][j]) for j in range(n)]) for i in range(n))
    inv = tuple(
        S.add_all(S.scale(S.add(xs[j], S.const(-b[j])), Ainv[i][j]) for j in range(n)) for i in range(n)
    )
    return PolyDiffeo(fwd, inv, name)


def shear_diffeo(n: int, target: int, source: int, coeff=1, power: int = 2, name: str = "shear") -> PolyDiffeo:
    """x^target -> x^target + coeff (x^source)^power, everything else fixed."""
    if target == source:
        raise InvalidInverse("a shear needs distinct target and source")
    xs = [coord(xc(i)) for i in range(n)]
    bump = S.scale(S.power(xs[source], power), S.Q(coeff))
    fwd = tuple(xs[i] + bump if i == target else xs[i] for i in range(n))
    inv = tuple(xs[i] - bump if i == target else xs[i] for i in range(n))
    return PolyDiffeo(fwd, inv, name)


def standard_diffeos(n: int) -> list[PolyDiffeo]:
    """Test family: affine maps of both orientations, shears, a translation and composites."""
    I = [[S.Q(int(i == j)) for j in range(n)] for i in range(n)]
    rot = [row[:] for row in I]
    rot[0][0], rot[0][1], rot[1][0], rot[1][1] = S.Q("3/5"), S.Q("-4/5"), S.Q("4/5"), S.Q("3/5")
    refl = [row[:] for row in I]
    refl[0][0] = S.Q(-1)
    gen = [[(2 if i == j else 0) + (1 if j == i + 1 else 0) - (S.Q("1/3") if i == j + 1 else 0) for j in range(n)] for i in range(n)]
    swap = [row[:] for row in I]
    swap[0], swap[1] = swap[1], swap[0]
    neg_gen = [[-v for v in gen[0]]] + [row[:] for row in gen[1:]]
    rotation = affine_diffeo(rot, name="rotation")
    reflection = affine_diffeo(refl, [1] + [0] * (n - 1), name="reflection")
    shear = shear_diffeo(n, 1, 0, 1, 2, name="shear")
    cubic = shear_diffeo(n, 0, n - 1, S.Q("-1/3"), 3, name="cubic-shear")
    out = [
        affine_diffeo(I, [S.Q(2)] + [S.Q("-1/2")] * (n - 1), name="translation"),
        rotation,
        reflection,
        affine_diffeo(gen, [S.Q("1/2")] * n, name="affine"),
        affine_diffeo(neg_gen, name="affine-reversing"),
        affine_diffeo(swap, name="swap"),
        shear,
        cubic,
        shear_diffeo(n, 0, 1, S.Q("2/3"), 2, name="shear-back"),
        shear.compose(rotation),
        reflection.compose(cubic),
        shear.compose(shear_diffeo(n, n - 1, 0, S.Q("1/2"), 1, name="linear-shear")),
    ]
    return out


# ---------------------------------------------------------------------------
# prolongation and pullback


def transform_metric(y, J):
    """``y'_ij = y_ab J^a_i J^b_j``; generic over the coefficient ring."""
    n = len(J)
    return [[_sum(y[a][b] * J[a][i] * J[b][j] for a in range(n) for b in range(n)) for j in range(n)] for i in range(n)]


def transform_jets(y, yjet, J, H):
    """Jet part of the prolonged action.

    ``y'_ij,k = y_ab,c J^c_k J^a_i J^b_j + y_ab J^b_j H^a_ik + y_ab J^a_i H^b_jk``
    with ``yjet[a][b][c] = y_ab,c``.
    """
    n = len(J)
    out = [[[None] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                terms = []
                for a in range(n):
                    for b in range(n):
                        for c in range(n):
                            terms.append(yjet[a][b][c] * J[c][k] * J[a][i] * J[b][j])
                        terms.append(y[a][b] * J[b][j] * H[a][i][k])
                        terms.append(y[a][b] * J[a][i] * H[b][j][k])
                out[i][j][k] = _sum(terms)
    return out


def _sum(items):
    items = list(items)
    if items and all(isinstance(t, Expr) for t in items):
        return S.add_all(items)
    total = 0
    for t in items:
        total = total + t
    return total


def prolong_diffeo(phi: PolyDiffeo) -> dict[S.JetCoordinate, Expr]:
    """Substitution sending each jet coordinate to its composition with the prolonged map."""
    if "prolong" in phi._cache:
        return phi._cache["prolong"]
    n = phi.n
    to_image = {xc(i): phi.forward[i] for i in range(n)}
    memo: dict = {}
    J = [[S.substitute(e, to_image, memo) for e in row] for row in jacobian(phi.inverse)]
    H = [[[S.substitute(e, to_image, memo) for e in r2] for r2 in r1] for r1 in hessian(phi.inverse)]
    y = [[coord(yc(a, b)) for b in range(n)] for a in range(n)]
    yjet = [[[coord(jc(a, b, c)) for c in range(n)] for b in range(n)] for a in range(n)]
    ynew = transform_metric(y, J)
    jnew = transform_jets(y, yjet, J, H)
    sub: dict = {xc(i): phi.forward[i] for i in range(n)}
    for i in range(n):
        for j in range(i, n):
            sub[yc(i, j)] = ynew[i][j]
            for k in range(n):
                sub[jc(i, j, k)] = jnew[i][j][k]
    phi._cache["prolong"] = sub
    return sub


def compose_substitutions(outer: Substitution, inner: Substitution) -> dict:
    """Substitution for ``c -> outer[c] o inner``: apply ``outer`` first, then ``inner``."""
    memo: dict = {}
    return {c: S.substitute(e, inner, memo) for c, e in outer.items()}


def scaling_substitution(s, n: int) -> dict[S.JetCoordinate, Expr]:
    """y -> s y and y_jet -> s y_jet; the rational stand-in for the exp(t) action."""
    s = S.Q(s)
    if s <= 0:
        raise NonpositiveScale(f"scale factor must be positive, got {s}")
    sub = {}
    for c in S.coordinates(n):
        sub[c] = coord(c) if c.kind == BASE else S.scale(coord(c), s)
    return sub


def _as_substitution(phi) -> Substitution:
    return prolong_diffeo(phi) if isinstance(phi, PolyDiffeo) else phi


def pullback_form(phi, a: DiffForm) -> DiffForm:
    """Pull ``a`` back along a prolonged diffeomorphism (or any substitution)."""
    sub = _as_substitution(phi)
    memo: dict = {}
    dimage: dict = {}

    def d_of(c):
        if c not in dimage:
            img = sub.get(c)
            dimage[c] = DiffForm.d(c) if img is None else DiffForm.scalar(S.as_expr(img)).dext()
        return dimage[c]

    parts = []
    for key, coeff in a.terms.items():
        f = DiffForm.scalar(S.substitute(coeff, sub, memo) if isinstance(coeff, Expr) else coeff)
        for c in key:
            f = f.wedge(d_of(c))
        parts.append(f)
    return sum_forms(parts, a.degree)


def pullback_matrix(phi, m: MatrixForm) -> MatrixForm:
    return m.map(lambda f: pullback_form(phi, f))


def pushforward(phi, point: S.JetPoint, vectors: Sequence[Mapping]) -> tuple[dict, list[dict]]:
    """Image point and pushed-forward tangent vectors, via dual numbers."""
    sub = _as_substitution(phi)
    n = point.n
    coords = S.coordinates(n)
    ev = S.Evaluator(point.values)
    image = {c: (ev(S.as_expr(sub[c])) if c in sub else point.values[c]) for c in coords}
    pushed = []
    for v in vectors:
        dev = S.Evaluator({c: Dual(point.values[c], S.Q(v.get(c, 0))) for c in coords})
        w = {}
        for c in coords:
            val = dev(S.as_expr(sub[c])) if c in sub else Dual(point.values[c], S.Q(v.get(c, 0)))
            d = val.b if isinstance(val, Dual) else 0
            if d != 0:
                w[c] = d
        pushed.append(w)
    return image, pushed


def pullback_evaluate(phi, a: DiffForm, point: S.JetPoint, vectors: Sequence[Mapping]):
    """``(phi* a)_p(v_1..v_k) = a_{phi(p)}(phi_* v_1, ..)`` without building ``phi* a``."""
    image, pushed = pushforward(phi, point, vectors)
    return a.evaluate(image, pushed)


def pullback_restrict(phi, a, point: S.JetPoint, vectors: Sequence[Mapping]):
    """Restriction of the pullback of a form (or matrix form) to the span of ``vectors``."""
    image, pushed = pushforward(phi, point, vectors)
    return a.restrict(image, pushed)


def gauge_pullback_connection(phi: PolyDiffeo, conn: MatrixForm) -> MatrixForm:
    """``J^-1 (phi* conn) J + J^-1 dJ`` with ``J = D phi`` as functions of x.

    A connection invariant under the prolonged action is returned unchanged.
    """
    if conn.degree != 1:
        raise ValueError("connection forms have degree 1")
    n = phi.n
    J = phi.jacobian()
    to_image = {xc(i): phi.forward[i] for i in range(n)}
    memo: dict = {}
    # (D phi)^-1 at x equals D(phi^-1) at phi(x)
    Jinv = [[S.substitute(e, to_image, memo) for e in row] for row in jacobian(phi.inverse)]
    pulled = pullback_matrix(phi, conn)
    conj = left_mul(Jinv, right_mul(pulled, J))
    dJ = MatrixForm([[DiffForm.scalar(J[a][j]).dext() for j in range(n)] for a in range(n)], 1)
    return conj + left_mul(Jinv, dJ)


# ---------------------------------------------------------------------------
# vector fields


@dataclass(frozen=True)
class VectorFieldPoly:
    components: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(S.as_expr(c) for c in self.components))

    @property
    def n(self) -> int:
        return len(self.components)

    @classmethod
    def linear(cls, A: Sequence[Sequence]) -> "VectorFieldPoly":
        n = len(A)
        return cls(tuple(S.add_all(S.scale(coord(xc(j)), S.Q(A[i][j])) for j in range(n)) for i in range(n)))


def lift_vector_field(X: VectorFieldPoly) -> dict[S.JetCoordinate, Expr]:
    """Components of the natural lift to the metric bundle.

    ``X^i d/dx^i - sum_{i<=j} (dX^r/dx^i y_rj + dX^k/dx^j y_ki) d/dy_ij``;
    zero components are omitted.
    """
    n = X.n
    dX = [[S.partial(X.components[r], xc(i)) for i in range(n)] for r in range(n)]
    out: dict = {}
    for i in range(n):
        if X.components[i] is not S.ZERO:
            out[xc(i)] = X.components[i]
    for i in range(n):
        for j in range(i, n):
            e = -S.add_all(
                [S.mul(dX[r][i], coord(yc(r, j))) for r in range(n)]
                + [S.mul(dX[k][j], coord(yc(k, i))) for k in range(n)]
            )
            if e is not S.ZERO:
                out[yc(i, j)] = e
    return out


def linear_flow_velocity(A: Sequence[Sequence], x: Sequence, y: Sequence[Sequence]) -> dict:
    """d/dt at t=0 of the affine action of exp(tA) on (x, y), computed exactly.

    Uses ``exp(tA) = I + tA + O(t^2)`` as a dual number, transforms the metric
    with the Jacobian of the inverse map and reads off the eps part.
    """
    n = len(A)
    M = [[Dual(S.Q(1 if i == j else 0), S.Q(A[i][j])) for j in range(n)] for i in range(n)]
    Minv = S.inverse_exact(M)
    out = {}
    for i in range(n):
        v = _sum(M[i][j] * S.Q(x[j]) for j in range(n))
        if v.b != 0:
            out[xc(i)] = v.b
    ynew = transform_metric([[S.Q(v) for v in row] for row in y], Minv)
    for i in range(n):
        for j in range(i, n):
            if ynew[i][j].b != 0:
                out[yc(i, j)] = ynew[i][j].b
    return out


# ---------------------------------------------------------------------------
# holonomic sections and classical oracles


@dataclass(frozen=True)
class MetricSection:
    """Symmetric matrix of polynomials in x, positive definite at ``sample_points``."""

    entries: tuple[tuple[Expr, ...], ...]
    sample_points: tuple[tuple, ...] = ()
    name: str = "g"

    def __post_init__(self):
        rows = tuple(tuple(S.as_expr(e) for e in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("metric section must be square")
        for i in range(n):
            for j in range(n):
                if rows[i][j] is not rows[j][i]:
                    raise ValueError("metric section must be symmetric")
        for pt in self.sample_points:
            if not self.positive_at(pt):
                raise SingularMetric(f"{self.name} is not positive definite at {pt}")

    @property
    def n(self) -> int:
        return len(self.entries)

    def at(self, x) -> list[list]:
        ev = S.Evaluator(_base_values(self.n, x))
        return [[ev(e) for e in row] for row in self.entries]

    def positive_at(self, x) -> bool:
        return S._leading_minors_positive(self.at(x))

    @classmethod
    def from_json(cls, data: Mapping) -> "MetricSection":
        rows = data["entries"]
        n = len(rows)
        entries = [[base_polynomial(rows[i][j], n) for j in range(n)] for i in range(n)]
        pts = tuple(tuple(S.Q(v) for v in p) for p in data.get("sample_points", []))
        return cls(tuple(map(tuple, entries)), pts, data.get("name", "g"))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "entries": [[polynomial_table(e, self.n) for e in row] for row in self.entries],
            "sample_points": [[S.fraction_str(v) for v in p] for p in self.sample_points],
        }


def diagonal_metric(diag: Sequence, sample_points=(), name: str = "g") -> MetricSection:
    n = len(diag)
    z = S.ZERO
    rows = tuple(tuple(S.as_expr(diag[i]) if i == j else z for j in range(n)) for i in range(n))
    return MetricSection(rows, tuple(sample_points), name)


def euclidean_metric(n: int) -> MetricSection:
    return diagonal_metric([S.ONE] * n, [tuple([0] * n)], "euclidean")


def base_sample_points(n: int, count: int, seed: int = 0, radius=1) -> tuple[tuple, ...]:
    rng = random.Random(seed)
    return tuple(tuple(S.random_rational(rng, -radius, radius, max_den=4) for _ in range(n)) for _ in range(count))


def _poly(n: int, **terms) -> Expr:
    """Polynomial from keyword exponents, e.g. ``_poly(2, c=1, x1x1=1)`` = 1 + x1^2."""
    parts = []
    for name, c in terms.items():
        mono = S.ONE
        if name != "c":
            for tok in name.split("x")[1:]:
                mono = S.mul(mono, coord(xc(int(tok) - 1)))
        parts.append(S.scale(mono, S.Q(c)))
    return S.add_all(parts)


def standard_metrics(n: int, points: int = 10, seed: int = 0) -> list[MetricSection]:
    """Five polynomial metrics, positive definite on [-1, 1]^n, with sample points there.

    Rows list the upper triangle; entries below the diagonal are mirrored.
    """
    pts = base_sample_points(n, points, seed) + (tuple([0] * n),)
    P = lambda **t: _poly(n, **t)  # noqa: E731
    Z = S.ZERO

    def sym(rows):
        m = [list(r) for r in rows]
        return tuple(tuple(S.as_expr(m[min(i, j)][max(i, j)]) for j in range(n)) for i in range(n))

    if n == 2:
        mats = [
            ("diag(1,1+x1^2)", [[1, 0], [None, P(c=1, x1x1=1)]]),
            ("mixed", [[P(c=1, x2x2=1), P(x1="1/2")], [None, P(c=2, x1x1=1)]]),
            ("product", [[2, P(x1x2=1)], [None, P(c=2, x2x2=1)]]),
            ("cubic", [[P(c=1, x1x1=1, x2x2=1), 0], [None, P(c=2, x1x2=1, x2x2x2="-1/3")]]),
            ("sheared", [[1, P(x1=1)], [None, P(c=1, x1x1=2)]]),
        ]
    elif n == 3:
        mats = [
            ("diag(1,1+x1^2,1+x2^2)", [[1, 0, 0], [None, P(c=1, x1x1=1), 0], [None, None, P(c=1, x2x2=1)]]),
            ("banded", [[2, P(x3=1), 0], [None, 2, P(x1="1/2")], [None, None, P(c=2, x2x2=1)]]),
            ("dominant", [[P(c=1, x1x1=1), P(x2="1/2"), P(x3="1/3")], [None, 2, 0], [None, None, P(c=1, x1x3="1/2")]]),
            ("sheared", [[1, P(x1=1), 0], [None, P(c=1, x1x1=1), 0], [None, None, 1]]),
            ("cubic", [[P(c=2, x2x3=1), 0, 0], [None, P(c=1, x3x3=1), 0], [None, None, P(c=3, x1x1x1=-1)]]),
        ]
    else:
        mats = [
            ("diag", [[1, 0, 0, 0], [None, P(c=1, x1x1=1), 0, 0], [None, None, P(c=2, x2x3=1), 0], [None, None, None, P(c=1, x4x4=1)]]),
            ("banded", [[2, P(x3=1), 0, 0], [None, 2, P(x1="1/2"), 0], [None, None, P(c=2, x2x2=1), P(x4="1/2")], [None, None, None, 2]]),
            ("sheared", [[1, P(x1=1), 0, 0], [None, P(c=1, x1x1=1), 0, 0], [None, None, 1, P(x2=1)], [None, None, None, P(c=1, x2x2=1)]]),
            ("cubic", [[P(c=2, x2x3=1), 0, 0, 0], [None, P(c=1, x3x3=1), 0, 0], [None, None, P(c=3, x1x1x1=-1), 0], [None, None, None, P(c=1, x4x4=1)]]),
            ("mixed", [[P(c=2, x4x4=1), P(x1x2="1/2"), 0, P(x3="1/2")], [None, 2, 0, 0], [None, None, 2, 0], [None, None, None, 2]]),
        ]
    out = []
    for name, rows in mats:
        full = [[rows[i][j] if j >= i else rows[j][i] for j in range(n)] for i in range(n)]
        out.append(MetricSection(sym(full), pts, name))
    return out


def section_substitution(g: MetricSection) -> dict[S.JetCoordinate, Expr]:
    """y_ij -> g_ij(x), y_ij,k -> dg_ij/dx^k; x stays."""
    n = g.n
    sub: dict = {}
    for i in range(n):
        for j in range(i, n):
            sub[yc(i, j)] = g.entries[i][j]
            for k in range(n):
                sub[jc(i, j, k)] = S.partial(g.entries[i][j], xc(k))
    return sub


def holonomic_pullback(g: MetricSection, a: DiffForm) -> DiffForm:
    """Pullback along the 1-jet of a section; the result only involves dx."""
    return pullback_form(section_substitution(g), a)


def holonomic_pullback_matrix(g: MetricSection, m: MatrixForm) -> MatrixForm:
    sub = section_substitution(g)
    return m.map(lambda f: pullback_form(sub, f))


def _christoffel_at(g: MetricSection, values: dict):
    """Christoffel symbols at a (possibly dual-number) base point."""
    n = g.n
    ev = S.Evaluator(values)
    G = [[ev(e) for e in row] for row in g.entries]
    dG = [[[ev(S.partial(g.entries[a][b], xc(k))) for k in range(n)] for b in range(n)] for a in range(n)]
    Ginv = S.inverse_exact(G)
    half = S.Q("1/2")
    return [
        [
            [
                half * _sum(Ginv[i][a] * (dG[a][j][k] + dG[a][k][j] - dG[j][k][a]) for a in range(n))
                for k in range(n)
            ]
            for j in range(n)
        ]
        for i in range(n)
    ]


def _eps_part(v):
    return v.b if isinstance(v, Dual) else 0


def _require_positive(g: MetricSection, x):
    m = g.at(x)
    if not S._leading_minors_positive(m):
        raise SingularMetric(f"{g.name} is not positive definite at {list(x)}")


def classical_levi_civita(g: MetricSection, x) -> list[list[list]]:
    """``Gamma[i][j][k]`` of the textbook formula at the base point ``x``."""
    _require_positive(g, x)
    return _christoffel_at(g, _base_values(g.n, x))


def classical_connection_forms(g: MetricSection, x) -> MatrixForm:
    G = classical_levi_civita(g, x)
    n = g.n
    return MatrixForm([[DiffForm(1, {(xc(k),): G[i][j][k] for k in range(n)}) for j in range(n)] for i in range(n)], 1)


def classical_curvature(g: MetricSection, x) -> MatrixForm:
    """``R^i_j = dGamma^i_jl ^ dx^l + Gamma^i_ak Gamma^a_jl dx^k ^ dx^l`` as numeric 2-forms.

    Derivatives of Gamma come from evaluating at ``x + eps e_l`` with dual numbers.
    """
    _require_positive(g, x)
    n = g.n
    base = _base_values(n, x)
    gam = _christoffel_at(g, base)
    dgam = []  # dgam[l][i][j][k] = d_l Gamma^i_jk
    for l in range(n):
        pt = {c: Dual(v, 1 if c == xc(l) else 0) for c, v in base.items()}
        dl = _christoffel_at(g, pt)
        dgam.append([[[_eps_part(v) for v in row] for row in mat] for mat in dl])
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            terms = {}
            for k in range(n):
                for l in range(k + 1, n):
                    v = dgam[k][i][j][l] - dgam[l][i][j][k]
                    v += sum(gam[i][a][k] * gam[a][j][l] - gam[i][a][l] * gam[a][j][k] for a in range(n))
                    terms[(xc(k), xc(l))] = v
            row.append(DiffForm(2, terms))
        rows.append(row)
    return MatrixForm(rows, 2)


def gaussian_curvature(g: MetricSection, x):
    """K = R_1212 / det g for n = 2, with R_1212 = g_1a R^a_2(d1, d2)."""
    if g.n != 2:
        raise ValueError("Gaussian curvature needs n = 2")
    R = classical_curvature(g, x)
    G = g.at(x)
    key = (xc(0), xc(1))
    r1212 = sum(G[0][a] * R.entries[a][1].terms.get(key, 0) for a in range(2))
    return r1212 / S.det_exact(G)


def section_pushforward(g: MetricSection, x, vectors: Sequence[Sequence]) -> tuple[dict, list[dict]]:
    """Image of a base point under the 1-jet of ``g`` and the pushed base vectors."""
    n = g.n
    base = _base_values(n, x)
    sub = section_substitution(g)
    coords = S.coordinates(n)
    ev = S.Evaluator(base)
    image = {c: (base[c] if c.kind == BASE else ev(sub[c])) for c in coords}
    pushed = []
    for v in vectors:
        dev = S.Evaluator({xc(i): Dual(base[xc(i)], S.Q(v[i])) for i in range(n)})
        w = {}
        for c in coords:
            d = S.Q(v[c.i]) if c.kind == BASE else _eps_part(dev(sub[c]))
            if d != 0:
                w[c] = d
        pushed.append(w)
    return image, pushed
