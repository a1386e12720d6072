"""Universal Pontryagin and Euler forms.

Every form carries its ``(2 pi)`` power separately. The Euler form is kept
as the pair ``(Pf(g Omega), det g)``, standing for
``(2 pi)^(-n/2) det(g)^(-1/2) Pf(g Omega)``, so identities involving it are
checked in squared or cleared-denominator form.

High-degree forms for n >= 3 are never built symbolically: the curvature is
restricted to the span of a tangent tuple and the wedge algebra is done on
R^m. Exterior derivatives of such forms come from dual-number evaluation,
``d a(v_0..v_p) = sum_i (-1)^i v_i(a(.. v_i omitted ..))`` (the vectors are
coordinate-constant, so no bracket terms).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from . import scalar_expr as S
from .checking import EXACT, SAMPLED, SYMBOLIC, Check, random_vectors, symbolic_compare, vector_json
from .errors import OddDimension, OutOfRange
from .forms import DiffForm, MatrixForm, PrefactoredForm, char_coeff, left_mul, pfaffian, wedge_det
from .geometry import GeometryContext, default_mode
from .jet_actions import (
    MetricSection,
    PolyDiffeo,
    classical_curvature,
    pushforward,
    section_pushforward,
)
from .scalar_expr import Dual, xc, yc


def _eps(v):
    return v.b if isinstance(v, Dual) else 0


def _real(v):
    return v.a if isinstance(v, Dual) else v


def _check_k(n: int, k: int):
    if k < 1 or 2 * k > n:
        raise OutOfRange(f"k = {k} outside 1..{n // 2}")


def _require_even(n: int):
    if n % 2:
        raise OddDimension(f"Euler form needs even n, got {n}")


# ---------------------------------------------------------------------------
# Pontryagin forms


def pontryagin(ctx: GeometryContext, k: int) -> PrefactoredForm:
    """Symbolic ``p_k(Omega)``; affordable for n = 2 (and n = 3, k = 1)."""
    _check_k(ctx.n, k)
    cache = ctx.__dict__.setdefault("_pontryagin", {})
    if k not in cache:
        cache[k] = char_coeff(k, ctx.curvature)
    return cache[k]


def restricted_curvature(ctx: GeometryContext, values, vectors: Sequence[Mapping]) -> MatrixForm:
    return ctx.curvature.restrict(values, vectors)


def pontryagin_value(ctx: GeometryContext, k: int, values, vectors: Sequence[Mapping]):
    """Rational part of ``p_k(Omega)`` at ``values`` on a ``4k``-tuple."""
    _check_k(ctx.n, k)
    if len(vectors) != 4 * k:
        raise ValueError(f"p_{k} takes {4 * k} vectors")
    return char_coeff(k, restricted_curvature(ctx, values, vectors)).rational_part.top_value()


def sampled_dext(fn: Callable, point: S.JetPoint, vectors: Sequence[Mapping]):
    """``d a(v_0..v_p)`` from ``fn(values, vectors) = a_values(vectors)``."""
    total = S.Q(0)
    for i, v in enumerate(vectors):
        dual = {c: Dual(x, S.Q(v.get(c, 0))) for c, x in point.values.items()}
        val = fn(dual, list(vectors[:i]) + list(vectors[i + 1 :]))
        total += (-1) ** i * _eps(val)
    return total


def check_closed_pontryagin(
    ctx: GeometryContext, k: int = 1, mode: str | None = None, trials: int = 20, samples: int = 50,
    seed: int = 0, perturbation: DiffForm | None = None,
) -> Check:
    """d p_k(Omega) = 0; ``perturbation`` is added to p_k (harness control)."""
    n = ctx.n
    _check_k(n, k)
    mode = mode or (SYMBOLIC if n == 2 else SAMPLED)
    name = f"d p_{k}(Omega) = 0" + (" [perturbed]" if perturbation is not None else "")
    if mode == SYMBOLIC:
        form = pontryagin(ctx, k).rational_part
        if perturbation is not None:
            form = form + perturbation
        d = form.dext()
        return symbolic_compare(name, n, d, DiffForm.zero(d.degree), trials, seed)

    def fn(values, vecs):
        v = pontryagin_value(ctx, k, values, vecs)
        if perturbation is not None:
            v = v + perturbation.evaluate(values, vecs)
        return v

    rng = random.Random(seed)
    for _ in range(samples):
        p = S.random_point(n, rng)
        vecs = random_vectors(n, 4 * k + 1, rng)
        val = sampled_dext(fn, p, vecs)
        if val != 0:
            return Check(name, n, SAMPLED, False, seed, samples, witness={
                "point": p.to_json(), "vectors": [vector_json(v) for v in vecs], "value": S.fraction_str(val)})
    return Check(name, n, SAMPLED, True, seed, samples)


def brute_force_wedge_value(forms: Sequence[DiffForm], point, vectors: Sequence[Mapping]):
    """``(a_1 ^ .. ^ a_r)(v_1..v_m)`` by the alternation formula over all permutations.

    Each factor is evaluated on its own slice of the permuted vectors, so the
    wedge product's key merging is never used.
    """
    degs = [f.degree for f in forms]
    m = sum(degs)
    if len(vectors) != m:
        raise ValueError("wrong number of vectors")
    norm = 1
    for d in degs:
        for t in range(2, d + 1):
            norm *= t
    ev = S.Evaluator(point.values) if isinstance(point, S.JetPoint) else point
    total = S.Q(0)
    for perm in itertools.permutations(range(m)):
        sign = S._perm_sign(perm)
        prod, pos = S.Q(1), 0
        for f, d in zip(forms, degs):
            prod *= f.evaluate(ev, [vectors[perm[pos + t]] for t in range(d)])
            pos += d
            if prod == 0:
                break
        total += sign * prod
    return total / norm


def brute_force_p1_value(ctx: GeometryContext, point, vectors: Sequence[Mapping]):
    """Rational part of p_1 on four vectors: sum over i<j of Om_ii^Om_jj - Om_ij^Om_ji."""
    om = ctx.curvature.entries
    total = S.Q(0)
    for i in range(ctx.n):
        for j in range(i + 1, ctx.n):
            total += brute_force_wedge_value([om[i][i], om[j][j]], point, vectors)
            total -= brute_force_wedge_value([om[i][j], om[j][i]], point, vectors)
    return total


def p1_nonvanishing_witness(ctx: GeometryContext, point: S.JetPoint | None = None) -> Check:
    """A coordinate 4-tuple on which p_1(Omega) is nonzero, confirmed by brute force."""
    n = ctx.n
    point = point or S.normal_point(n)
    if n == 2:
        at = pontryagin(ctx, 1).rational_part.at(point)
        candidates = sorted(at.terms)
    else:
        candidates = itertools.combinations(S.coordinates(n), 4)
    for key in candidates:
        vecs = [{c: 1} for c in key]
        val = pontryagin_value(ctx, 1, point.values, vecs)
        if val != 0:
            brute = brute_force_p1_value(ctx, point, vecs)
            return Check("p_1(Omega) != 0", n, EXACT, brute == val, None, 1, details={
                "point": point.to_json(), "vectors": [vector_json(v) for v in vecs],
                "value": S.fraction_str(val), "brute_force_value": S.fraction_str(brute), "two_pi_power": -2})
    return Check("p_1(Omega) != 0", n, EXACT, False, None, 0)


def check_pontryagin_invariance(
    ctx: GeometryContext, phi: PolyDiffeo, k: int = 1, samples: int = 10, seed: int = 0
) -> Check:
    """phi* p_k(Omega) = p_k(Omega) at sampled (point, tuple) pairs."""
    n = ctx.n
    _check_k(n, k)
    rng = random.Random(seed)
    name = f"{phi.name}* p_{k}(Omega) = p_{k}(Omega)"
    for _ in range(samples):
        p = S.random_point(n, rng)
        vecs = random_vectors(n, 4 * k, rng)
        image, pushed = pushforward(phi, p, vecs)
        lhs = pontryagin_value(ctx, k, image, pushed)
        rhs = pontryagin_value(ctx, k, p.values, vecs)
        if lhs != rhs:
            return Check(name, n, SAMPLED, False, seed, samples, witness={
                "point": p.to_json(), "vectors": [vector_json(v) for v in vecs],
                "lhs": S.fraction_str(lhs), "rhs": S.fraction_str(rhs)})
    return Check(name, n, SAMPLED, True, seed, samples)


def _base_vectors(n: int, count: int, rng: random.Random) -> list[list]:
    return [[S.random_rational(rng, -2, 2, max_den=5) for _ in range(n)] for _ in range(count)]


def _base_dict(v: Sequence) -> dict:
    return {xc(i): S.Q(x) for i, x in enumerate(v) if x != 0}


def check_holonomic_pontryagin(
    ctx: GeometryContext, g: MetricSection, points: Sequence, k: int = 1, seed: int = 0
) -> Check:
    """(j^1 g)* p_k(Omega) = p_k of the classical curvature of g at the given base points."""
    n = ctx.n
    _check_k(n, k)
    rng = random.Random(seed)
    name = f"(j1 {g.name})* p_{k}(Omega) = p_{k}(R^{g.name})"
    for x in points:
        vecs = _base_vectors(n, 4 * k, rng)
        image, pushed = section_pushforward(g, x, vecs)
        lhs = pontryagin_value(ctx, k, image, pushed)
        R = classical_curvature(g, x)
        rhs = char_coeff(k, R.restrict(None, [_base_dict(v) for v in vecs])).rational_part.top_value()
        if lhs != rhs:
            return Check(name, n, SAMPLED, False, seed, len(points), witness={
                "x": [S.fraction_str(v) for v in x], "lhs": S.fraction_str(lhs), "rhs": S.fraction_str(rhs)})
    return Check(name, n, SAMPLED, True, seed, len(points))


# ---------------------------------------------------------------------------
# Euler form


@dataclass(frozen=True)
class EulerPair:
    """``E = (2 pi)^two_pi_power det_g^(-1/2) pf_flat``."""

    pf_flat: DiffForm
    det_g: S.Expr
    two_pi_power: int


def lowered_curvature(ctx: GeometryContext) -> MatrixForm:
    cache = ctx.__dict__
    if "_lowered_curvature" not in cache:
        cache["_lowered_curvature"] = ctx.lower(ctx.curvature)
    return cache["_lowered_curvature"]


def check_lowered_antisymmetric(ctx: GeometryContext, mode: str | None = None, trials=20, samples=50, seed=0) -> Check:
    """g Omega + (g Omega)^T = 0."""
    from .checking import compare

    mode = mode or default_mode(ctx.n)
    low = lowered_curvature(ctx)
    return compare("g Omega antisymmetric", ctx.n, low, -low.T, mode, trials, samples, seed)


def euler(ctx: GeometryContext, trials: int = 20, seed: int = 0) -> EulerPair:
    """Symbolic Euler data; raises NotAntisymmetric if g Omega is not antisymmetric."""
    n = ctx.n
    _require_even(n)
    cache = ctx.__dict__
    if "_euler" not in cache:
        pf = pfaffian(lowered_curvature(ctx), S.IdentityChecker(n, trials, seed))
        cache["_euler"] = EulerPair(pf, ctx.det_g, -n // 2)
    return cache["_euler"]


def pf_flat_value(ctx: GeometryContext, values, vectors: Sequence[Mapping]):
    """``Pf(g Omega)`` at ``values`` on an n-tuple, via restriction."""
    n = ctx.n
    _require_even(n)
    if len(vectors) != n:
        raise ValueError(f"Pf(g Omega) takes {n} vectors")
    ev = S.Evaluator(values) if not isinstance(values, S.Evaluator) else values
    G = [[ev(S.coord(yc(i, j))) for j in range(n)] for i in range(n)]
    low = left_mul(G, ctx.curvature.restrict(ev, vectors))
    return pfaffian(low).top_value()


def _det_value(ctx: GeometryContext, values):
    ev = S.Evaluator(values) if not isinstance(values, S.Evaluator) else values
    return ev(ctx.det_g)


def check_euler_closed(ctx: GeometryContext, mode: str | None = None, trials=20, samples=50, seed=0,
                       perturbation: DiffForm | None = None) -> Check:
    """2 det(g) d Pf(g Omega) = d det(g) ^ Pf(g Omega), i.e. dE = 0 without the square root."""
    n = ctx.n
    _require_even(n)
    mode = mode or (SYMBOLIC if n == 2 else SAMPLED)
    name = "2 det(g) dPf = d det(g) ^ Pf" + (" [perturbed]" if perturbation is not None else "")
    if mode == SYMBOLIC:
        pf = euler(ctx, trials, seed).pf_flat
        if perturbation is not None:
            pf = pf + perturbation
        lhs = pf.dext().scale(ctx.det_g * 2)
        rhs = DiffForm.scalar(ctx.det_g).dext().wedge(pf)
        return symbolic_compare(name, n, lhs, rhs, trials, seed)

    def pf_fn(values, vecs):
        v = pf_flat_value(ctx, values, vecs)
        if perturbation is not None:
            v = v + perturbation.evaluate(values, vecs)
        return v

    rng = random.Random(seed)
    for _ in range(samples):
        p = S.random_point(n, rng)
        vecs = random_vectors(n, n + 1, rng)
        det = _det_value(ctx, p.values)
        lhs = 2 * det * sampled_dext(pf_fn, p, vecs)
        rhs = S.Q(0)
        for i, v in enumerate(vecs):
            dual = {c: Dual(x, S.Q(v.get(c, 0))) for c, x in p.values.items()}
            rest = vecs[:i] + vecs[i + 1 :]
            rhs += (-1) ** i * _eps(_det_value(ctx, dual)) * pf_fn(p.values, rest)
        if lhs != rhs:
            return Check(name, n, SAMPLED, False, seed, samples, witness={
                "point": p.to_json(), "vectors": [vector_json(v) for v in vecs],
                "lhs": S.fraction_str(lhs), "rhs": S.fraction_str(rhs)})
    return Check(name, n, SAMPLED, True, seed, samples)


def check_euler_square(ctx: GeometryContext, mode: str | None = None, trials=20, samples=10, seed=0) -> Check:
    """det(g)^-1 Pf ^ Pf = p_{n/2}(Omega), both with prefactor (2 pi)^-n."""
    n = ctx.n
    _require_even(n)
    mode = mode or (SYMBOLIC if n == 2 else SAMPLED)
    name = "E ^ E = p_{n/2}(Omega)"
    if mode == SYMBOLIC:
        e = euler(ctx, trials, seed)
        p = pontryagin(ctx, n // 2)
        if 2 * e.two_pi_power != p.two_pi_power:
            return Check(name, n, SYMBOLIC, False, seed, 0, witness={"two_pi_power": [2 * e.two_pi_power, p.two_pi_power]})
        lhs = e.pf_flat.wedge(e.pf_flat).scale(1 / e.det_g)
        return symbolic_compare(name, n, lhs, p.rational_part, trials, seed)
    rng = random.Random(seed)
    k = n // 2
    for _ in range(samples):
        p = S.random_point(n, rng)
        vecs = random_vectors(n, 2 * n, rng)
        ev = S.Evaluator(p.values)
        G = p.metric()
        restricted = ctx.curvature.restrict(ev, vecs)
        pf = pfaffian(left_mul(G, restricted))
        lhs = pf.wedge(pf).top_value() / S.det_exact(G)
        rhs = char_coeff(k, restricted).rational_part.top_value()
        if lhs != rhs:
            return Check(name, n, SAMPLED, False, seed, samples, witness={
                "point": p.to_json(), "vectors": [vector_json(v) for v in vecs],
                "lhs": S.fraction_str(lhs), "rhs": S.fraction_str(rhs)})
    return Check(name, n, SAMPLED, True, seed, samples, details={"two_pi_power": -n})


def check_euler_sign_flip(ctx: GeometryContext, phi: PolyDiffeo, samples: int = 10, seed: int = 0) -> Check:
    """Pullback of the Euler data under an affine map.

    ``phi* Pf(g Omega) = det(J)^-1 Pf(g Omega)`` and ``phi* det g = det(J)^-2 det g``,
    so ``phi* E = sign(det J) E``; also ``phi* p_k = p_k``. Reported as
    ``details["orientation_sign"]``.
    """
    n = ctx.n
    _require_even(n)
    J = [[S.evaluate(e, {}) if e.is_const else None for e in row] for row in phi.jacobian()]
    if any(v is None for row in J for v in row):
        raise ValueError("sign-flip check needs an affine map")
    detJ = S.det_exact(J)
    sign = 1 if detJ > 0 else -1
    name = f"{phi.name}* E = {'+' if sign > 0 else '-'}E"
    rng = random.Random(seed)
    for _ in range(samples):
        p = S.random_point(n, rng)
        vecs = random_vectors(n, n, rng)
        image, pushed = pushforward(phi, p, vecs)
        pf_pulled = pf_flat_value(ctx, image, pushed)
        pf_here = pf_flat_value(ctx, p.values, vecs)
        det_pulled = _det_value(ctx, image)
        det_here = _det_value(ctx, p.values)
        ok = pf_pulled * detJ == pf_here and det_pulled * detJ * detJ == det_here
        for k in range(1, n // 2 + 1):
            if not ok:
                break
            wk = random_vectors(n, 4 * k, rng)
            img_k, pushed_k = pushforward(phi, p, wk)
            ok = pontryagin_value(ctx, k, img_k, pushed_k) == pontryagin_value(ctx, k, p.values, wk)
        if not ok:
            return Check(name, n, SAMPLED, False, seed, samples, witness={
                "point": p.to_json(), "vectors": [vector_json(v) for v in vecs],
                "pf_pulled": S.fraction_str(pf_pulled), "pf": S.fraction_str(pf_here), "det_J": S.fraction_str(detJ)})
    return Check(name, n, SAMPLED, True, seed, samples, details={"orientation_sign": sign, "det_J": S.fraction_str(detJ)})


def check_holonomic_euler(ctx: GeometryContext, g: MetricSection, points: Sequence, seed: int = 0) -> Check:
    """(j^1 g)* Pf(g Omega) = Pf(g R^g) and (j^1 g)* det = det g(x)."""
    n = ctx.n
    _require_even(n)
    rng = random.Random(seed)
    name = f"(j1 {g.name})* Pf(g Omega) = Pf(g R^{g.name})"
    for x in points:
        vecs = _base_vectors(n, n, rng)
        image, pushed = section_pushforward(g, x, vecs)
        lhs = pf_flat_value(ctx, image, pushed)
        G = g.at(x)
        R = classical_curvature(g, x)
        rhs = pfaffian(left_mul(G, R.restrict(None, [_base_dict(v) for v in vecs]))).top_value()
        if lhs != rhs or _det_value(ctx, image) != S.det_exact(G):
            return Check(name, n, SAMPLED, False, seed, len(points), witness={
                "x": [S.fraction_str(v) for v in x], "lhs": S.fraction_str(lhs), "rhs": S.fraction_str(rhs)})
    return Check(name, n, SAMPLED, True, seed, len(points))


def holonomic_euler_density(ctx: GeometryContext, g: MetricSection, x):
    """Coefficient of dx^1 ^ .. ^ dx^n in the pulled-back Pf(g Omega), and det g(x)."""
    n = ctx.n
    _require_even(n)
    vecs = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    image, pushed = section_pushforward(g, x, vecs)
    return pf_flat_value(ctx, image, pushed), S.det_exact(g.at(x))
