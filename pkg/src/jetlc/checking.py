"""Check results and the two comparison modes used by every identity check.

``symbolic``: every coefficient of the difference is decided zero as a
rational function (polynomial expansion, else seeded identity testing).
``sampled``: both sides are evaluated exactly at seeded random jet points on
seeded random tangent tuples.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from . import scalar_expr as S
from .forms import DiffForm, MatrixForm, form_witness

SYMBOLIC, SAMPLED = "symbolic", "sampled"
# deterministic exact computations (no random sampling) report as symbolic
EXACT = SYMBOLIC


@dataclass
class Check:
    name: str
    dimension: int
    mode: str
    passed: bool
    seed: int | None = None
    samples: int = 0
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "dimension": self.dimension,
            "mode": self.mode,
            "seed": self.seed,
            "samples": self.samples,
            "status": "pass" if self.passed else "fail",
            "witness": self.witness,
            "details": self.details,
        }


def vector_json(v: dict) -> dict:
    return {(c.name if hasattr(c, "name") else str(c)): S.fraction_str(x) for c, x in sorted(v.items())}


def random_vector(n: int, rng: random.Random) -> dict:
    return {c: S.random_rational(rng, -2, 2, max_den=5) for c in S.coordinates(n)}


def random_vectors(n: int, count: int, rng: random.Random) -> list[dict]:
    return [random_vector(n, rng) for _ in range(count)]


def _entries(x):
    if isinstance(x, MatrixForm):
        return [((i, j), x.entries[i][j]) for i in range(x.n) for j in range(x.n)]
    return [((), x)]


def symbolic_compare(name: str, n: int, a, b, trials: int = 20, seed: int = 0) -> Check:
    """Coefficient-level equality of two forms or matrix forms."""
    checker = S.IdentityChecker(n, trials, seed)
    for (idx, fa), (_, fb) in zip(_entries(a), _entries(b)):
        w = form_witness(fa, fb, checker)
        if w is not None:
            key, point = w
            return Check(
                name, n, SYMBOLIC, False, seed, trials,
                witness={
                    "entry": list(idx),
                    "basis": [getattr(c, "name", str(c)) for c in key],
                    "point": point.to_json() if point is not None else None,
                },
            )
    return Check(name, n, SYMBOLIC, True, seed, trials)


def sampled_compare(name: str, n: int, a, b, count: int = 50, seed: int = 0) -> Check:
    """Exact equality of values at ``count`` random (point, tangent tuple) pairs."""
    rng = random.Random(seed)
    degree = _entries(a)[0][1].degree
    pairs_a, pairs_b = _entries(a), _entries(b)
    for _ in range(count):
        p = S.random_point(n, rng)
        vecs = random_vectors(n, degree, rng)
        ev = S.Evaluator(p.values)
        for (idx, fa), (_, fb) in zip(pairs_a, pairs_b):
            va = fa.evaluate(ev, vecs)
            vb = fb.evaluate(ev, vecs)
            if va != vb:
                return Check(
                    name, n, SAMPLED, False, seed, count,
                    witness={
                        "entry": list(idx),
                        "point": p.to_json(),
                        "vectors": [vector_json(v) for v in vecs],
                        "lhs": S.fraction_str(va),
                        "rhs": S.fraction_str(vb),
                    },
                )
    return Check(name, n, SAMPLED, True, seed, count)


def compare(name: str, n: int, a, b, mode: str, trials: int = 20, samples: int = 50, seed: int = 0) -> Check:
    if mode == SYMBOLIC:
        return symbolic_compare(name, n, a, b, trials, seed)
    return sampled_compare(name, n, a, b, samples, seed)


def scalar_compare(name: str, n: int, pairs: Sequence, trials: int = 20, seed: int = 0) -> Check:
    """Symbolic equality of a list of ``(label, lhs, rhs)`` scalar expressions."""
    checker = S.IdentityChecker(n, trials, seed)
    for label, lhs, rhs in pairs:
        w = checker.witness(S.as_expr(lhs) - S.as_expr(rhs))
        if w is not None:
            return Check(name, n, SYMBOLIC, False, seed, trials, witness={"at": label, "point": w.to_json()})
    return Check(name, n, SYMBOLIC, True, seed, trials)


def zero_like(x):
    if isinstance(x, MatrixForm):
        return MatrixForm.zero(x.n, x.degree)
    return DiffForm.zero(x.degree)
