"""Verification suites and the report they produce.

Each suite function returns a list of ``Check`` objects for one dimension.
Iteration orders and seeds are fixed, so two runs of the same config give
byte-identical reports.
"""

from __future__ import annotations

import json
import logging
import random
import time
from dataclasses import dataclass, field
from typing import Callable

from . import charforms as CF
from . import invariant_theory as INV
from . import jet_actions as JA
from . import scalar_expr as S
from .checking import EXACT, SAMPLED, SYMBOLIC, Check, compare, scalar_compare
from .errors import JetError
from .forms import DiffForm, MatrixForm, char_coeff, pfaffian
from .geometry import (
    build_context,
    check_crist,
    check_gamma_symmetric,
    check_nabla_hor,
    check_nabla_univ,
    check_printed_curvature_coefficient,
    check_vartheta_symmetric,
    default_mode,
    verify_curvature_identity,
    verify_lemasym,
    verify_uniqueness_family,
)
from .scalar_expr import coord, jc, xc, yc

log = logging.getLogger("jetlc")

SUITES = ("engine", "geometry", "curvature", "uniqueness", "scaling", "invariance", "oracle", "charforms", "invariants")
UNIQUENESS_PAIRS = ((1, 0), (0, 1), (1, 1), (-2, 3))
SCALES = ("1/4", "4", "9")


class ConfigError(JetError, ValueError):
    pass


@dataclass
class SuiteConfig:
    dimensions: list[int] = field(default_factory=lambda: [2])
    seed: int = 0
    trials: int = 20
    samples: int = 50
    nabla_samples: int = 100
    invariance_samples: int = 20
    heavy_samples: int = 5
    oracle_points: int = 10
    sampled_only: bool = False
    suites: list[str] = field(default_factory=lambda: list(SUITES))
    standard_families: bool = True
    metrics: list = field(default_factory=list)
    diffeos: list = field(default_factory=list)
    corrupt_christoffel: bool = False
    out: str = "report.json"

    _INT_KEYS = ("seed", "trials", "samples", "nabla_samples", "invariance_samples", "heavy_samples", "oracle_points")
    _BOOL_KEYS = ("sampled_only", "standard_families", "corrupt_christoffel")

    @classmethod
    def from_json(cls, data) -> "SuiteConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = set(cls._INT_KEYS) | set(cls._BOOL_KEYS) | {"dimensions", "suites", "metrics", "diffeos", "out"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        cfg = cls()
        for k in cls._INT_KEYS:
            if k in data:
                v = data[k]
                if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                    raise ConfigError(f"{k} must be a non-negative integer")
                setattr(cfg, k, v)
        for k in cls._BOOL_KEYS:
            if k in data:
                if not isinstance(data[k], bool):
                    raise ConfigError(f"{k} must be true or false")
                setattr(cfg, k, data[k])
        if "dimensions" in data:
            dims = data["dimensions"]
            if not isinstance(dims, list) or not dims or any(d not in S.SUPPORTED_DIMENSIONS for d in dims):
                raise ConfigError(f"dimensions must be a non-empty subset of {list(S.SUPPORTED_DIMENSIONS)}")
            cfg.dimensions = sorted(set(dims))
        if "suites" in data:
            suites = data["suites"]
            if not isinstance(suites, list) or any(s not in SUITES for s in suites):
                raise ConfigError(f"suites must be a list drawn from {list(SUITES)}")
            cfg.suites = [s for s in SUITES if s in suites]
        if "out" in data:
            if not isinstance(data["out"], str):
                raise ConfigError("out must be a path string")
            cfg.out = data["out"]
        try:
            cfg.metrics = [JA.MetricSection.from_json(m) for m in data.get("metrics", [])]
            cfg.diffeos = [JA.PolyDiffeo.from_json(d) for d in data.get("diffeos", [])]
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"bad metric or diffeomorphism table: {exc}") from exc
        return cfg

    def recorded(self) -> dict:
        """The part of the config copied verbatim into every report."""
        return {
            "dimensions": self.dimensions,
            "seed": self.seed,
            "trials": self.trials,
            "samples": self.samples,
            "nabla_samples": self.nabla_samples,
            "invariance_samples": self.invariance_samples,
            "heavy_samples": self.heavy_samples,
            "oracle_points": self.oracle_points,
            "sampled_only": self.sampled_only,
            "suites": self.suites,
            "standard_families": self.standard_families,
            "metrics": [m.to_json() for m in self.metrics],
            "diffeos": [d.to_json() for d in self.diffeos],
            "corrupt_christoffel": self.corrupt_christoffel,
        }

    def mode(self, n: int) -> str:
        return SAMPLED if self.sampled_only else default_mode(n)

    def mode2(self, n: int) -> str:
        """Symbolic only for n = 2 (high-degree objects)."""
        return SAMPLED if self.sampled_only or n > 2 else SYMBOLIC

    def metrics_for(self, n: int) -> list:
        std = JA.standard_metrics(n, self.oracle_points, self.seed) if self.standard_families else []
        return std + [m for m in self.metrics if m.n == n]

    def diffeos_for(self, n: int) -> list:
        std = JA.standard_diffeos(n) if self.standard_families else []
        return std + [d for d in self.diffeos if d.n == n]


def _expect_failure(name: str, c: Check) -> Check:
    """A control: passes when the wrapped check detects the planted defect."""
    return Check(name, c.dimension, c.mode, not c.passed and c.witness is not None, c.seed, c.samples, witness=c.witness)


def _fact(name: str, n: int, ok: bool, **details) -> Check:
    return Check(name, n, EXACT, bool(ok), None, 1, details=details)


# ---------------------------------------------------------------------------
# engine health


def random_poly(n: int, rng: random.Random, terms: int = 3, deg: int = 2) -> S.Expr:
    coords = S.coordinates(n)
    out = []
    for _ in range(terms):
        mono = S.ONE
        for _ in range(rng.randint(0, deg)):
            mono = S.mul(mono, coord(rng.choice(coords)))
        out.append(S.scale(mono, S.random_rational(rng, -3, 3, max_den=3)))
    return S.add_all(out)


def random_form(n: int, degree: int, rng: random.Random, terms: int = 3) -> DiffForm:
    coords = S.coordinates(n)
    parts = [DiffForm.zero(degree)]
    for _ in range(terms):
        key = rng.sample(coords, degree)
        parts.append(DiffForm.basis(*key, coeff=random_poly(n, rng)))
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    return out


def random_numeric_antisymmetric(m: int, dim: int, rng: random.Random) -> list[list[DiffForm]]:
    """m x m antisymmetric matrix of numeric 2-forms on R^dim."""
    keys = [(a, b) for a in range(dim) for b in range(a + 1, dim)]
    M = [[DiffForm.zero(2) for _ in range(m)] for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            f = DiffForm(2, {k: S.random_rational(rng, -3, 3, 3) for k in rng.sample(keys, min(3, len(keys)))})
            M[i][j], M[j][i] = f, -f
    return M


def random_invertible(m: int, rng: random.Random) -> list[list]:
    while True:
        B = [[S.Q(rng.randint(-3, 3)) for _ in range(m)] for _ in range(m)]
        d = S.det_exact(B)
        if d != 0:
            return B


def _conj(B, M, Binv):
    m = len(M)
    out = []
    for i in range(m):
        row = []
        for j in range(m):
            f = DiffForm.zero(M[0][0].degree)
            for a in range(m):
                for b in range(m):
                    c = B[i][a] * Binv[b][j]
                    if c != 0:
                        f = f + M[a][b].scale(c)
            row.append(f)
        out.append(row)
    return out


def _identities(name: str, n: int, pairs, trials: int, seed: int) -> Check:
    """Symbolic equality for every (lhs, rhs) pair of forms."""
    count = 0
    for a, b in pairs:
        c = compare(name, n, a, b, SYMBOLIC, trials, 0, seed)
        count += 1
        if not c.passed:
            c.witness["case"] = count
            return c
    return Check(name, n, SYMBOLIC, True, seed, count)


def engine_suite(n: int, cfg: SuiteConfig) -> list[Check]:
    rng = random.Random(cfg.seed + 1000 * n)
    cases, t, s = 10, cfg.trials, cfg.seed
    out = []

    def dd():
        for p in (0, 1, 2):
            for _ in range(cases):
                a = random_form(n, p, rng)
                yield a.dext().dext(), DiffForm.zero(p + 2)

    def graded():
        for _ in range(cases):
            p, q = rng.randint(0, 2), rng.randint(0, 2)
            a, b = random_form(n, p, rng), random_form(n, q, rng)
            yield a.wedge(b), b.wedge(a).scale((-1) ** (p * q))

    def assoc():
        for _ in range(cases):
            a, b, c = (random_form(n, rng.randint(0, 2), rng) for _ in range(3))
            yield a.wedge(b).wedge(c), a.wedge(b.wedge(c))

    def leibniz():
        for _ in range(cases):
            a, b = random_form(n, 1, rng), random_form(n, 2, rng)
            yield a.wedge(b).dext(), a.dext().wedge(b) - a.wedge(b.dext())

    out.append(_identities("d(d a) = 0 on random forms", n, dd(), t, s))
    out.append(_identities("a ^ b = (-1)^pq b ^ a", n, graded(), t, s))
    out.append(_identities("(a ^ b) ^ c = a ^ (b ^ c)", n, assoc(), t, s))
    out.append(_identities("d(a ^ b) = da ^ b - a ^ db (deg a = 1)", n, leibniz(), t, s))
    m = 2 * (n // 2) if n >= 2 else 2
    ok = True
    for _ in range(cases):
        A = random_numeric_antisymmetric(m, 2 * m, rng)
        B = random_invertible(m, rng)
        BtAB = _conj([list(r) for r in zip(*B)], A, B)
        ok &= pfaffian(BtAB) == pfaffian(A).scale(S.det_exact(B))
    out.append(Check(f"Pf(B^T A B) = det(B) Pf(A), {m}x{m}", n, EXACT, ok, cfg.seed, cases))
    ok = True
    for _ in range(cases):
        A = random_numeric_antisymmetric(n, 2 * n, rng)
        B = random_invertible(n, rng)
        C = _conj(B, A, S.inverse_exact(B))
        for k in range(1, n // 2 + 1):
            ok &= char_coeff(k, C).form == char_coeff(k, A).form
    out.append(Check("char_coeff(B A B^-1) = char_coeff(A)", n, EXACT, ok, cfg.seed, cases))
    return out


# ---------------------------------------------------------------------------
# geometry


def geometry_suite(n: int, cfg: SuiteConfig) -> list[Check]:
    ctx = build_context(n, cfg.corrupt_christoffel)
    mode, t, s = cfg.mode(n), cfg.trials, cfg.seed
    out = [
        check_crist(ctx, t, s),
        check_gamma_symmetric(ctx, t, s),
        check_nabla_hor(ctx, mode, t, cfg.nabla_samples, s),
        check_nabla_univ(ctx, mode, t, cfg.nabla_samples, s),
        check_vartheta_symmetric(ctx, mode, t, cfg.samples, s),
    ]
    rng = random.Random(s + 7)
    alpha = MatrixForm(
        [[DiffForm(1, {(c,): S.const(S.random_rational(rng, -2, 2, 3)) for c in rng.sample(S.coordinates(n), 2)}) for _ in range(n)]
         for _ in range(n)], 1,
    )
    lem = verify_lemasym(ctx, alpha, mode, t, cfg.samples, s)
    lem.name += " (random constant alpha)"
    out.append(lem)
    lem2 = verify_lemasym(ctx, ctx.vartheta.scale(S.HALF), mode, t, cfg.samples, s)
    lem2.name += " (alpha = vartheta/2)"
    out.append(lem2)
    return out


def curvature_suite(n: int, cfg: SuiteConfig) -> list[Check]:
    ctx = build_context(n, cfg.corrupt_christoffel)
    mode = cfg.mode2(n)
    out = verify_curvature_identity(ctx, mode, cfg.trials, cfg.samples, cfg.seed)
    out.append(check_printed_curvature_coefficient(ctx, mode, cfg.trials, cfg.samples, cfg.seed))
    z0 = S.normal_point(n)
    val = ctx.curvature.entries[0][1].evaluate(z0, [{yc(0, 0): 1}, {yc(0, 1): 1}])
    out.append(_fact("Omega^1_2(d/dy11, d/dy12) = -1/4 at the normal point", n, val == S.Q("-1/4"), value=S.fraction_str(val)))
    return out


def uniqueness_suite(n: int, cfg: SuiteConfig) -> list[Check]:
    ctx = build_context(n, cfg.corrupt_christoffel)
    out = []
    for lam, mu in UNIQUENESS_PAIRS:
        _, c = verify_uniqueness_family(ctx, lam, mu, cfg.mode(n), cfg.trials, cfg.samples, cfg.seed)
        out.append(c)
    return out


# ---------------------------------------------------------------------------
# symmetry actions


def scaling_suite(n: int, cfg: SuiteConfig) -> list[Check]:
    ctx = build_context(n, cfg.corrupt_christoffel)
    mode = cfg.mode2(n)
    out = []
    for s_str in SCALES:
        s = S.Q(s_str)
        sub = JA.scaling_substitution(s, n)
        pb = lambda m: JA.pullback_matrix(sub, m)  # noqa: E731
        g_scaled = MatrixForm.from_scalars([[S.substitute(e, sub) for e in row] for row in ctx.g])
        checks = [
            compare(f"scale {s_str}: omega invariant", n, pb(ctx.omega), ctx.omega, mode, cfg.trials, cfg.samples, cfg.seed),
            compare(f"scale {s_str}: vartheta invariant", n, pb(ctx.vartheta), ctx.vartheta, mode, cfg.trials, cfg.samples, cfg.seed),
            compare(f"scale {s_str}: omega_hor invariant", n, pb(ctx.omega_hor), ctx.omega_hor, mode, cfg.trials, cfg.samples, cfg.seed),
            compare(f"scale {s_str}: theta -> s theta", n, pb(ctx.theta), ctx.theta.scale(s), mode, cfg.trials, cfg.samples, cfg.seed),
            compare(f"scale {s_str}: g -> s g", n, g_scaled, MatrixForm.from_scalars(ctx.g).scale(s), mode, cfg.trials, cfg.samples, cfg.seed),
        ]
        out += checks
    # group law s.(t.p) = (st).p
    a, b = S.Q("1/4"), S.Q(9)
    comp = JA.compose_substitutions(JA.scaling_substitution(a, n), JA.scaling_substitution(b, n))
    direct = JA.scaling_substitution(a * b, n)
    out.append(scalar_compare("scaling is a group action", n,
                              [(c.name, comp[c], direct[c]) for c in S.coordinates(n)], cfg.trials, cfg.seed))
    return out


def invariance_suite(n: int, cfg: SuiteConfig) -> list[Check]:
    ctx = build_context(n, cfg.corrupt_christoffel)
    out = []
    diffeos = cfg.diffeos_for(n)
    pk_samples = cfg.invariance_samples if n <= 3 else cfg.heavy_samples
    for idx, phi in enumerate(diffeos):
        seed = cfg.seed + idx
        gp = JA.gauge_pullback_connection(phi, ctx.omega)
        out.append(_sampled_matrix_check(f"{phi.name}: gauge pullback of omega = omega", n, gp, ctx.omega,
                                         cfg.invariance_samples, seed))
        for k in range(1, n // 2 + 1):
            c = CF.check_pontryagin_invariance(ctx, phi, k, pk_samples if k == 1 else cfg.heavy_samples, seed)
            out.append(c)
    # prolongation is a functor
    sub_id = JA.prolong_diffeo(JA.identity_diffeo(n))
    out.append(scalar_compare("prolong(id) = id", n,
                              [(c.name, sub_id[c], coord(c)) for c in S.coordinates(n)], cfg.trials, cfg.seed))
    # affine outer maps keep the composite within the supported degree
    affine = [d for d in diffeos if max(JA.poly_degree(f) for f in d.forward) <= 1]
    affine = affine or [JA.identity_diffeo(n)]
    for i, psi in enumerate(diffeos[::2]):
        out.append(_functoriality(affine[i % len(affine)], psi, cfg))
    return out


def _sampled_matrix_check(name, n, a: MatrixForm, b: MatrixForm, count, seed) -> Check:
    rng = random.Random(seed)
    for _ in range(count):
        p = S.random_point(n, rng)
        ev = S.Evaluator(p.values)
        if a.at(ev) != b.at(ev):
            return Check(name, n, SAMPLED, False, seed, count, witness={"point": p.to_json()})
    return Check(name, n, SAMPLED, True, seed, count)


def _functoriality(phi: JA.PolyDiffeo, psi: JA.PolyDiffeo, cfg: SuiteConfig) -> Check:
    n = phi.n
    name = f"prolong({phi.name} o {psi.name}) = prolong({phi.name}) o prolong({psi.name})"
    both = JA.prolong_diffeo(phi.compose(psi))
    chained = JA.compose_substitutions(JA.prolong_diffeo(phi), JA.prolong_diffeo(psi))
    for p in S.random_points(n, cfg.invariance_samples, cfg.seed):
        ev = S.Evaluator(p.values)
        for c in S.coordinates(n):
            if ev(both[c]) != ev(chained[c]):
                return Check(name, n, SAMPLED, False, cfg.seed, cfg.invariance_samples,
                             witness={"point": p.to_json(), "coordinate": c.name})
    return Check(name, n, SAMPLED, True, cfg.seed, cfg.invariance_samples)


# ---------------------------------------------------------------------------
# classical oracles


def oracle_suite(n: int, cfg: SuiteConfig) -> list[Check]:
    ctx = build_context(n, cfg.corrupt_christoffel)
    out = []
    unit = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    for g in cfg.metrics_for(n):
        pts = g.sample_points or JA.base_sample_points(n, cfg.oracle_points, cfg.seed)
        name = g.name
        om = JA.holonomic_pullback_matrix(g, ctx.omega)
        th = JA.holonomic_pullback_matrix(g, ctx.theta)
        out.append(_fact(f"(j1 {name})* theta = 0", n, th.is_zero()))
        bad = None
        for x in pts:
            xv = {xc(i): S.Q(v) for i, v in enumerate(x)}
            if om.at(xv) != JA.classical_connection_forms(g, x):
                bad = ("omega", x)
                break
            image, pushed = JA.section_pushforward(g, x, unit)
            if ctx.curvature.restrict(image, pushed) != JA.classical_curvature(g, x).restrict(None, [{xc(i): 1} for i in range(n)]):
                bad = ("curvature", x)
                break
            if any(image[yc(i, j)] != v for i, row in enumerate(g.at(x)) for j, v in enumerate(row) if j >= i):
                bad = ("metric", x)
                break
        witness = None if bad is None else {"object": bad[0], "x": [S.fraction_str(v) for v in bad[1]]}
        out.append(Check(f"(j1 {name})* omega, Omega, g = classical Levi-Civita data", n, SAMPLED, bad is None,
                         cfg.seed, len(pts), witness=witness))
        if n >= 4:
            out.append(CF.check_holonomic_pontryagin(ctx, g, pts[: cfg.heavy_samples], 1, cfg.seed))
        if n % 2 == 0:
            out.append(CF.check_holonomic_euler(ctx, g, pts, cfg.seed))
    if n == 2:
        g = JA.diagonal_metric([1, 1 + coord(xc(0)) ** 2], [(0, 0), (1, 0)], "diag(1,1+x1^2)")
        G = JA.classical_levi_civita(g, (1, 0))
        out.append(_fact("Gamma^2_12 = 1/2, Gamma^1_22 = -1 at x1 = 1", n,
                         G[1][0][1] == S.Q("1/2") and G[0][1][1] == -1,
                         gamma_2_12=S.fraction_str(G[1][0][1]), gamma_1_22=S.fraction_str(G[0][1][1])))
        K = JA.gaussian_curvature(g, (0, 0))
        pf, det = CF.holonomic_euler_density(ctx, g, (0, 0))
        out.append(_fact("K = -1 at x = 0; pulled-back Pf(g Omega) = K det(g)^(1/2) = -1", n,
                         K == -1 and pf == -1 and det == 1,
                         K=S.fraction_str(K), pf_flat=S.fraction_str(pf), det_g=S.fraction_str(det), two_pi_power=-1))
        flat = JA.euclidean_metric(n)
        p1 = CF.pontryagin(ctx, 1).rational_part
        out.append(_fact("(j1 euclidean)* p_1 = 0 and (j1 euclidean)* Pf(g Omega) = 0", n,
                         JA.holonomic_pullback(flat, p1).is_zero()
                         and JA.holonomic_pullback(flat, CF.euler(ctx).pf_flat).is_zero()))
    return out


# ---------------------------------------------------------------------------
# characteristic forms


def charforms_suite(n: int, cfg: SuiteConfig) -> list[Check]:
    ctx = build_context(n, cfg.corrupt_christoffel)
    mode = cfg.mode2(n)
    t, s = cfg.trials, cfg.seed
    out = []
    for k in range(1, n // 2 + 1):
        samples = cfg.samples if n <= 3 else cfg.heavy_samples
        out.append(CF.check_closed_pontryagin(ctx, k, mode, t, samples, s))
    few = min(cfg.samples, 10) if n <= 3 else cfg.heavy_samples
    if n >= 2:
        pert = DiffForm.basis(xc(0), yc(0, 0), jc(0, 0, 1), xc(1), coeff=coord(yc(0, 1)))
        out.append(_expect_failure("control: p_1 + y12 dx1^dy11^dy11,2^dx2 is not closed",
                                   CF.check_closed_pontryagin(ctx, 1, mode, t, few, s, pert)))
        literal = DiffForm.basis(xc(0), yc(0, 0), jc(0, 0, 1), xc(1), coeff=coord(yc(0, 0)))
        lit = CF.check_closed_pontryagin(ctx, 1, mode, t, few, s, literal)
        lit.name = "y11 dx1^dy11^dy11,2^dx2 is closed, so adding it keeps p_1 closed"
        out.append(lit)
    if n == 2:
        out.append(CF.p1_nonvanishing_witness(ctx))
    if n % 2 == 0:
        out.append(CF.check_lowered_antisymmetric(ctx, cfg.mode(n), t, cfg.samples, s))
        out.append(CF.check_euler_closed(ctx, mode, t, cfg.samples if n == 2 else cfg.heavy_samples, s))
        extra = [xc(i) for i in range(2, n)]
        pert = DiffForm.basis(xc(0), yc(0, 0), *extra, coeff=coord(yc(0, 1)))
        out.append(_expect_failure("control: Pf + y12 dx1^dy11^dx3^..^dxn breaks the closedness identity",
                                   CF.check_euler_closed(ctx, mode, t, min(cfg.samples, 10) if n == 2 else cfg.heavy_samples,
                                                         s, pert)))
        out.append(CF.check_euler_square(ctx, mode, t, 10, s))
        flip = JA.affine_diffeo(INV.reflection(n), name="diag(-1,1,..)")
        c = CF.check_euler_sign_flip(ctx, flip, 10, s)
        c.passed = c.passed and c.details.get("orientation_sign") == -1
        out.append(c)
        rot = JA.standard_diffeos(n)[1]
        c = CF.check_euler_sign_flip(ctx, rot, 10, s)
        c.passed = c.passed and c.details.get("orientation_sign") == 1
        out.append(c)
        twice = flip.compose(flip)
        c = CF.check_euler_sign_flip(ctx, twice, 10, s)
        c.passed = c.passed and c.details.get("orientation_sign") == 1
        out.append(c)
    return out


# ---------------------------------------------------------------------------
# invariant theory


def invariants_suite(n: int, cfg: SuiteConfig) -> list[Check]:
    out = []
    E = INV.module_E(n)
    rep = INV.invariant_subspace(E, "O")
    out.append(_fact(f"dim E^O({n}) = 2", n, rep.dimension == 2 and rep.residual_zero,
                     dimension=rep.dimension, summands=rep.summand_dimensions, basis=rep.vectors_json()))
    so = INV.invariant_subspace(E, "SO")
    if n >= 4:
        out.append(_fact(f"dim E^SO({n}) = dim E^O({n})", n, so.dimension == rep.dimension and so.residual_zero,
                         dimension=so.dimension))
    else:
        out.append(_fact(f"dim E^SO({n}) computed (>= dim E^O({n}))", n, so.dimension >= rep.dimension and so.residual_zero,
                         dimension=so.dimension))
    extra = [INV.rotation_345(n), INV.signed_permutation(list(range(1, n)) + [0], [1] * n),
             INV.signed_permutation(list(range(n)), [-1] * n)]
    rep2 = INV.invariant_subspace(E, "O", extra)
    out.append(_fact("invariant dimension stable under redundant constraints", n, rep2.dimension == rep.dimension))
    v3 = INV.invariant_subspace(INV.tensor_power(n, 3), "O")
    out.append(_fact(f"dim (V^3)^O({n}) = 0", n, v3.dimension == 0))
    q = INV.quartic_invariants(n)
    if n >= 3:
        ok = q.dimension == 3 and q.details["xi_spans"]
        label = f"dim (V^4)^O({n}) = 3, spanned by xi_1, xi_2, xi_3"
    else:
        ok = q.details["xi_in_span"]
        label = f"xi_1, xi_2, xi_3 are O({n})-invariant (dimension {q.dimension})"
    out.append(_fact(label, n, ok and q.residual_zero, dimension=q.dimension))
    m = INV.match_theta_trace_basis(n, cfg.seed)
    out.append(_fact("images of theta and tr(vartheta) g at the normal point span E^O(n)", n, m.passed, match=m.to_json()))
    return out


SUITE_FUNCS: dict[str, Callable[[int, SuiteConfig], list[Check]]] = {
    "engine": engine_suite,
    "geometry": geometry_suite,
    "curvature": curvature_suite,
    "uniqueness": uniqueness_suite,
    "scaling": scaling_suite,
    "invariance": invariance_suite,
    "oracle": oracle_suite,
    "charforms": charforms_suite,
    "invariants": invariants_suite,
}


def run(cfg: SuiteConfig) -> list[tuple[str, Check]]:
    results = []
    for n in cfg.dimensions:
        for suite in cfg.suites:
            t0 = time.perf_counter()
            try:
                checks = SUITE_FUNCS[suite](n, cfg)
            except JetError as exc:
                # a broken identity can surface as a structural error mid-suite
                checks = [Check(f"{suite} suite raised {type(exc).__name__}", n, EXACT, False, cfg.seed, 0,
                                witness={"error": type(exc).__name__, "message": str(exc)})]
            log.info("n=%d %-10s %3d checks, %d failed, %.1fs", n, suite, len(checks),
                     sum(not c.passed for c in checks), time.perf_counter() - t0)
            results += [(suite, c) for c in checks]
    return results


# ---------------------------------------------------------------------------
# reports


def report_json(cfg: SuiteConfig, results: list[tuple[str, Check]]) -> dict:
    checks = [{"suite": suite, **c.to_json()} for suite, c in results]
    failed = sum(not c.passed for _, c in results)
    return {
        "config": cfg.recorded(),
        "summary": {"total": len(results), "passed": len(results) - failed, "failed": failed},
        "checks": checks,
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def report_markdown(report: dict) -> str:
    cfg, summ = report["config"], report["summary"]
    lines = [
        "# Verification report",
        "",
        f"dimensions {cfg['dimensions']}, seed {cfg['seed']}, trials {cfg['trials']}, samples {cfg['samples']}",
        "",
        f"**{summ['passed']} / {summ['total']} checks passed**",
        "",
        "| suite | n | check | mode | samples | status |",
        "|---|---|---|---|---|---|",
    ]
    for c in report["checks"]:
        name = c["name"].replace("|", "\\|")
        lines.append(f"| {c['suite']} | {c['dimension']} | {name} | {c['mode']} | {c['samples']} | {c['status']} |")
    fails = [c for c in report["checks"] if c["status"] == "fail"]
    if fails:
        lines += ["", "## Failures", ""]
        for c in fails:
            lines += [f"### {c['suite']} / n={c['dimension']} / {c['name']}", "", "```json",
                      json.dumps(c["witness"], indent=2, sort_keys=True), "```", ""]
    return "\n".join(lines) + "\n"
