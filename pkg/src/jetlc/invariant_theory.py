"""Invariant subspaces of tensor representations of O(n) and SO(n).

A tensor space is a direct sum of summands; each summand is a tensor product
of factors ``"V"`` (basis ``e_1..e_n``) and ``"S2"`` (basis ``e_i . e_j``,
``i <= j``, the symmetric product with ``e_i . e_j = e_j . e_i``). Basis order:
summands in the given order, then lexicographic on the factor indices.

SO(n)-invariance is imposed through the Lie algebra (the group is
connected), O(n)-invariance adds the reflection ``diag(-1, 1, ..., 1)``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import linalg
from . import scalar_expr as S
from .errors import NotAntisymmetric, NotOrthogonal

V, S2 = "V", "S2"


def _factor_basis(kind: str, n: int) -> list[tuple]:
    if kind == V:
        return [(i,) for i in range(n)]
    if kind == S2:
        return [(i, j) for i in range(n) for j in range(i, n)]
    raise ValueError(f"unknown factor {kind!r}")


def _factor_label(kind: str, idx: tuple) -> str:
    return f"e{idx[0] + 1}" if kind == V else f"s{idx[0] + 1}{idx[1] + 1}"


@dataclass(frozen=True)
class TensorSpaceSpec:
    n: int
    summands: tuple[tuple[str, ...], ...]
    name: str = ""

    @cached_property
    def blocks(self) -> list[tuple[int, list[tuple]]]:
        """(offset, basis multi-indices) per summand."""
        out, off = [], 0
        for summ in self.summands:
            basis = list(itertools.product(*[_factor_basis(k, self.n) for k in summ]))
            out.append((off, basis))
            off += len(basis)
        return out

    @cached_property
    def index(self) -> dict[tuple, int]:
        """(summand number, multi-index) -> global column."""
        return {(s, b): off + t for s, (off, basis) in enumerate(self.blocks) for t, b in enumerate(basis)}

    @property
    def dimension(self) -> int:
        off, basis = self.blocks[-1]
        return off + len(basis)

    def summand_dimensions(self) -> list[int]:
        return [len(b) for _, b in self.blocks]

    def label(self, col: int) -> str:
        for s, (off, basis) in enumerate(self.blocks):
            if off <= col < off + len(basis):
                idx = basis[col - off]
                return "|".join(_factor_label(k, i) for k, i in zip(self.summands[s], idx))
        raise IndexError(col)


def module_E(n: int) -> TensorSpaceSpec:
    """V(x)V(x)V + S2V(x)V(x)V + S2V(x)V(x)V(x)V: the targets of dx, dy and dy_jet."""
    return TensorSpaceSpec(n, ((V, V, V), (S2, V, V), (S2, V, V, V)), "E")


def tensor_power(n: int, k: int) -> TensorSpaceSpec:
    return TensorSpaceSpec(n, ((V,) * k,), f"V^{k}")


# ---------------------------------------------------------------------------
# actions on one factor: sparse maps basis index -> {basis index: coefficient}


def _sym_key(a: int, b: int) -> tuple:
    return (a, b) if a <= b else (b, a)


def _factor_group(kind: str, A, n: int) -> dict[tuple, dict[tuple, object]]:
    out = {}
    for idx in _factor_basis(kind, n):
        img: dict = {}
        if kind == V:
            for a in range(n):
                if A[a][idx[0]] != 0:
                    img[(a,)] = A[a][idx[0]]
        else:
            i, j = idx
            for a in range(n):
                for b in range(n):
                    c = A[a][i] * A[b][j]
                    if c != 0:
                        key = _sym_key(a, b)
                        img[key] = img.get(key, 0) + c
        out[idx] = {k: v for k, v in img.items() if v != 0}
    return out


def _factor_algebra(kind: str, X, n: int) -> dict[tuple, dict[tuple, object]]:
    out = {}
    for idx in _factor_basis(kind, n):
        img: dict = {}
        if kind == V:
            for a in range(n):
                if X[a][idx[0]] != 0:
                    img[(a,)] = X[a][idx[0]]
        else:
            i, j = idx
            for a in range(n):
                if X[a][i] != 0:
                    key = _sym_key(a, j)
                    img[key] = img.get(key, 0) + X[a][i]
                if X[a][j] != 0:
                    key = _sym_key(i, a)
                    img[key] = img.get(key, 0) + X[a][j]
        out[idx] = {k: v for k, v in img.items() if v != 0}
    return out


def _to_fraction_matrix(M) -> list[list[Fraction]]:
    return [[linalg.to_fraction(S.Q(v)) for v in row] for row in M]


def check_antisymmetric(X) -> None:
    n = len(X)
    if any(X[i][j] + X[j][i] != 0 for i in range(n) for j in range(n)):
        raise NotAntisymmetric("Lie algebra generator must be antisymmetric")


def check_orthogonal(A) -> None:
    n = len(A)
    for i in range(n):
        for j in range(n):
            if sum(A[k][i] * A[k][j] for k in range(n)) != (1 if i == j else 0):
                raise NotOrthogonal("matrix is not orthogonal (A^T A != I)")


def algebra_action(spec: TensorSpaceSpec, X) -> list[dict[int, Fraction]]:
    """Columns of the derivation action of an antisymmetric matrix (Leibniz over factors)."""
    X = _to_fraction_matrix(X)
    check_antisymmetric(X)
    n = spec.n
    cols: list[dict[int, Fraction]] = []
    for s, (off, basis) in enumerate(spec.blocks):
        facs = [_factor_algebra(k, X, n) for k in spec.summands[s]]
        for idx in basis:
            img: dict[int, Fraction] = {}
            for f, act in enumerate(facs):
                for new, c in act[idx[f]].items():
                    tgt = idx[:f] + (new,) + idx[f + 1 :]
                    col = spec.index[(s, tgt)]
                    img[col] = img.get(col, 0) + c
            cols.append({k: v for k, v in img.items() if v != 0})
    return cols


def group_element_action(spec: TensorSpaceSpec, A) -> list[dict[int, Fraction]]:
    """Columns of the tensor-product action of an orthogonal matrix."""
    A = _to_fraction_matrix(A)
    check_orthogonal(A)
    n = spec.n
    cols: list[dict[int, Fraction]] = []
    for s, (off, basis) in enumerate(spec.blocks):
        facs = [_factor_group(k, A, n) for k in spec.summands[s]]
        for idx in basis:
            img: dict[int, Fraction] = {}
            for choice in itertools.product(*[facs[f][idx[f]].items() for f in range(len(facs))]):
                c = Fraction(1)
                for _, v in choice:
                    c *= v
                col = spec.index[(s, tuple(k for k, _ in choice))]
                img[col] = img.get(col, 0) + c
            cols.append({k: v for k, v in img.items() if v != 0})
    return cols


def columns_to_rows(cols: Sequence[dict[int, object]], nrows: int) -> list[dict[int, object]]:
    rows: list[dict] = [{} for _ in range(nrows)]
    for j, col in enumerate(cols):
        for i, v in col.items():
            rows[i][j] = v
    return rows


def apply_columns(cols: Sequence[dict[int, object]], v: dict[int, object]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for j, x in v.items():
        for i, c in cols[j].items():
            out[i] = out.get(i, 0) + linalg.to_fraction(c) * linalg.to_fraction(x)
    return {k: w for k, w in out.items() if w != 0}


def so_generators(n: int) -> list[list[list[int]]]:
    """E_ab - E_ba for a < b."""
    out = []
    for a in range(n):
        for b in range(a + 1, n):
            X = [[0] * n for _ in range(n)]
            X[a][b], X[b][a] = 1, -1
            out.append(X)
    return out


def reflection(n: int) -> list[list[int]]:
    return [[(-1 if i == 0 else 1) if i == j else 0 for j in range(n)] for i in range(n)]


def rotation_345(n: int, a: int = 0, b: int = 1) -> list[list[Fraction]]:
    R = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R[a][a], R[a][b], R[b][a], R[b][b] = Fraction(3, 5), Fraction(-4, 5), Fraction(4, 5), Fraction(3, 5)
    return R


def signed_permutation(perm: Sequence[int], signs: Sequence[int]) -> list[list[int]]:
    n = len(perm)
    M = [[0] * n for _ in range(n)]
    for j, (i, s) in enumerate(zip(perm, signs)):
        M[i][j] = s
    return M


# ---------------------------------------------------------------------------
# invariant subspaces


@dataclass
class InvariantReport:
    space: str
    n: int
    group: str
    dimension: int
    basis: list[dict[int, int]]
    labels: list[str]
    residual_zero: bool
    summand_dimensions: list[int] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def vectors_json(self) -> list[dict[str, str]]:
        return [{self.labels[k]: str(v) for k, v in sorted(vec.items())} for vec in self.basis]

    def to_json(self) -> dict:
        return {
            "space": self.space,
            "n": self.n,
            "group": self.group,
            "dimension": self.dimension,
            "ambient_dimension": sum(self.summand_dimensions),
            "summand_dimensions": self.summand_dimensions,
            "basis": self.vectors_json(),
            "residual_zero": self.residual_zero,
            "details": self.details,
        }


def _minus_identity(cols: list[dict]) -> list[dict]:
    out = []
    for j, col in enumerate(cols):
        col = dict(col)
        col[j] = col.get(j, 0) - 1
        out.append({k: v for k, v in col.items() if v != 0})
    return out


def constraint_operators(spec: TensorSpaceSpec, group: str, extra: Sequence = ()) -> list[list[dict]]:
    """Operators whose common kernel is the invariant subspace (columns form).

    ``extra`` holds further orthogonal matrices; they are redundant for a
    correct action and only serve as a stability control.
    """
    group = group.upper()
    if group not in ("O", "SO"):
        raise ValueError(f"group must be O or SO, got {group!r}")
    ops = [algebra_action(spec, X) for X in so_generators(spec.n)]
    if group == "O":
        ops.append(_minus_identity(group_element_action(spec, reflection(spec.n))))
    for A in extra:
        ops.append(_minus_identity(group_element_action(spec, A)))
    return ops


def invariant_subspace(spec: TensorSpaceSpec, group: str = "O", extra: Sequence = ()) -> InvariantReport:
    """Exact invariant subspace; each summand is solved on its own (the action preserves them)."""
    ops = constraint_operators(spec, group, extra)
    dim = spec.dimension
    basis: list[dict[int, int]] = []
    for off, block in spec.blocks:
        cols = range(off, off + len(block))
        ech = linalg.Echelon()
        for op in ops:
            rows = columns_to_rows([op[c] for c in cols], dim)
            for r in rows:
                if r:
                    ech.add({j: v for j, v in r.items()})
        for v in ech.nullspace(len(block)):
            basis.append(linalg.primitive_vector({off + k: x for k, x in v.items()}))
    residual_zero = all(not apply_columns(op, vec) for op in ops for vec in basis)
    return InvariantReport(
        spec.name or "tensor space", spec.n, group.upper(),
        len(basis), basis, [spec.label(c) for c in range(dim)], residual_zero, spec.summand_dimensions(),
    )


def in_span(vectors: Sequence[dict], target: dict) -> list[Fraction] | None:
    return linalg.solve_in_span(vectors, target)


# ---------------------------------------------------------------------------
# quartic invariants


def xi_vectors(n: int) -> list[dict[int, int]]:
    """xi_1 = sum e_i e_i e_j e_j, xi_2 = sum e_i e_j e_i e_j, xi_3 = sum e_i e_j e_j e_i."""
    spec = tensor_power(n, 4)
    out = []
    for pattern in ((0, 0, 1, 1), (0, 1, 0, 1), (0, 1, 1, 0)):
        v: dict[int, int] = {}
        for i in range(n):
            for j in range(n):
                ij = (i, j)
                col = spec.index[(0, tuple((ij[p],) for p in pattern))]
                v[col] = v.get(col, 0) + 1
        out.append(v)
    return out


def quartic_invariants(n: int, group: str = "O") -> InvariantReport:
    spec = tensor_power(n, 4)
    rep = invariant_subspace(spec, group)
    xis = xi_vectors(n)
    coords = [in_span(rep.basis, xi) for xi in xis]
    rep.details["xi_in_span"] = all(c is not None for c in coords)
    rep.details["xi_rank"] = linalg.rank(xis)
    rep.details["xi_spans"] = rep.details["xi_in_span"] and rep.details["xi_rank"] == rep.dimension
    rep.details["xi"] = [{rep.labels[k]: str(v) for k, v in sorted(x.items())} for x in xis]
    return rep


# ---------------------------------------------------------------------------
# the invariant part of E seen from the jet bundle


def covector_image(spec: TensorSpaceSpec, c: S.JetCoordinate, i: int, j: int) -> tuple[int, int]:
    """Column of ``image(dc) (x) e_i (x) e_j`` with dx^k -> e_k, dy_ab -> e_a.e_b, dy_ab,k -> e_a.e_b (x) e_k."""
    if c.kind == S.BASE:
        return spec.index[(0, ((c.i,), (i,), (j,)))], 1
    if c.kind == S.METRIC:
        return spec.index[(1, ((c.i, c.j), (i,), (j,)))], 1
    return spec.index[(2, ((c.i, c.j), (c.k,), (i,), (j,)))], 1


def bilinear_form_image(spec: TensorSpaceSpec, form_at_point) -> dict[int, Fraction]:
    """Image in E of a bilinear-form-valued 1-form with numeric coefficients."""
    out: dict[int, Fraction] = {}
    n = spec.n
    for i in range(n):
        for j in range(n):
            for (c,), v in form_at_point.entries[i][j].terms.items():
                col, _ = covector_image(spec, c, i, j)
                out[col] = out.get(col, 0) + linalg.to_fraction(S.Q(v))
    return {k: v for k, v in out.items() if v != 0}


def eta_vectors(n: int) -> list[dict[int, int]]:
    """eta_1 = sum s_ii (x) e_j (x) e_j and eta_2 = sum s_ij (x) e_i (x) e_j (all i, j)."""
    spec = module_E(n)
    eta1: dict[int, int] = {}
    eta2: dict[int, int] = {}
    for i in range(n):
        for j in range(n):
            c1 = spec.index[(1, ((i, i), (j,), (j,)))]
            eta1[c1] = eta1.get(c1, 0) + 1
            c2 = spec.index[(1, (_sym_key(i, j), (i,), (j,)))]
            eta2[c2] = eta2.get(c2, 0) + 1
    return [eta1, eta2]


@dataclass
class BasisMatch:
    n: int
    passed: bool
    invariant_dimension: int
    theta_image: dict
    trace_image: dict
    theta_coords: list | None
    trace_coords: list | None
    eta_coords: list
    control_in_span: bool

    def to_json(self) -> dict:
        fr = lambda c: None if c is None else [str(x) for x in c]  # noqa: E731
        return {
            "n": self.n,
            "status": "pass" if self.passed else "fail",
            "invariant_dimension": self.invariant_dimension,
            "theta_image": self.theta_image,
            "trace_vartheta_g_image": self.trace_image,
            "theta_in_invariant_basis": fr(self.theta_coords),
            "trace_vartheta_g_in_invariant_basis": fr(self.trace_coords),
            "eta_in_image_basis": [fr(c) for c in self.eta_coords],
            "control_in_span": self.control_in_span,
        }


def match_theta_trace_basis(n: int, seed: int = 0) -> BasisMatch:
    """Images of theta and tr(vartheta) (x) g at the normal point form a basis of E^O(n)."""
    from .geometry import build_context

    spec = module_E(n)
    ctx = build_context(n)
    z0 = S.normal_point(n)
    theta = bilinear_form_image(spec, ctx.theta.at(z0))
    trace = bilinear_form_image(spec, ctx.trace_vartheta_g().at(z0))
    rep = invariant_subspace(spec, "O")
    th_c = in_span(rep.basis, theta)
    tr_c = in_span(rep.basis, trace)
    images = [theta, trace]
    independent = linalg.rank(images) == 2
    eta_c = [in_span(images, eta) for eta in eta_vectors(n)]
    rng = random.Random(seed)
    control = {rng.randrange(spec.dimension): Fraction(rng.randint(1, 9))}
    control_in = in_span(images, control) is not None
    passed = (
        rep.dimension == 2 and th_c is not None and tr_c is not None and independent
        and all(c is not None for c in eta_c) and not control_in
    )
    lab = lambda v: {spec.label(k): str(x) for k, x in sorted(v.items())}  # noqa: E731
    return BasisMatch(n, passed, rep.dimension, lab(theta), lab(trace), th_c, tr_c, eta_c, control_in)
