import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from jetlc import scalar_expr as S
from jetlc.errors import DivisionByZero, InvalidPoint, UnsupportedDimension
from jetlc.geometry import build_context
from jetlc.scalar_expr import Dual, coord, jc, xc, yc

from conftest import coords_of, exprs, jet_points


def test_coordinate_count():
    for n in (2, 3, 4):
        assert len(S.coordinates(n)) == n + n * (n + 1) // 2 + n * n * (n + 1) // 2
        assert S.coordinate_count(n) == len(set(S.coordinates(n)))


def test_symmetric_indices_normalize():
    assert yc(1, 0) == yc(0, 1)
    assert jc(1, 0, 1) == jc(0, 1, 1)
    assert S.partial(coord(yc(0, 1)), yc(1, 0)) is S.ONE


def test_parse_roundtrip():
    for c in S.coordinates(3):
        assert S.parse_coordinate(c.name) == c


def test_rationals_are_canonical():
    q = S.Q("6/-4")
    assert (q.numerator, q.denominator) == (-3, 2)
    assert S.fraction_str(S.Q(2)) == "2/1"
    with pytest.raises(TypeError):
        S.Q(0.5)


def test_eval_examples():
    p = S.normal_point(2)
    assert S.evaluate(S.const(S.Q("3/4")), p) == S.Q("3/4")
    y = lambda i, j: coord(yc(i, j))  # noqa: E731
    assert S.evaluate(y(0, 0) * y(1, 1) - y(0, 1) ** 2, p) == 1
    ctx = build_context(2)
    q = S.normal_point(2, y11_1=2)
    assert S.evaluate(ctx.gamma[0][0][0], q) == 1


def test_partial_examples():
    x1, y11 = coord(xc(0)), coord(yc(0, 0))
    assert S.partial(x1 * y11, yc(0, 0)) is x1
    d = S.partial(S.power(y11, -1), yc(0, 0))
    assert S.evaluate(d, S.normal_point(2)) == -1


def test_division_by_zero_names_node():
    e = S.power(coord(xc(0)), -1)
    with pytest.raises(DivisionByZero):
        S.evaluate(e, S.normal_point(2))


def test_inverse_metric():
    with pytest.raises(UnsupportedDimension):
        S.inverse_metric(5)
    inv = S.inverse_metric(2)
    assert [[S.evaluate(e, S.normal_point(2)) for e in row] for row in inv] == [[1, 0], [0, 1]]
    p = S.normal_point(2, y22=2)
    assert [[S.evaluate(e, p) for e in row] for row in inv] == [[1, 0], [0, S.Q("1/2")]]


@pytest.mark.parametrize("seed", range(5))
def test_inverse_metric_n3_product_is_identity(seed):
    p = S.random_point(3, random.Random(seed))
    inv = [[S.evaluate(e, p) for e in row] for row in S.inverse_metric(3)]
    g = p.metric()
    prod = [[sum(g[i][a] * inv[a][j] for a in range(3)) for j in range(3)] for i in range(3)]
    assert prod == [[1 if i == j else 0 for j in range(3)] for i in range(3)]


def test_equal_probabilistic_examples():
    y11, y22 = coord(yc(0, 0)), coord(yc(1, 1))
    assert S.equal_probabilistic(y11, y11)
    inv = S.inverse_metric(2)
    recomposed = y11 * inv[0][0] + coord(yc(0, 1)) * inv[1][0]
    assert S.equal_probabilistic(recomposed, S.ONE, n=2)
    for seed in range(5):
        assert not S.equal_probabilistic(y11, y22, seed=seed)
        assert S.probabilistic_witness(y11 - y22, seed=seed) is not None


def test_random_points_positive_definite():
    rng = random.Random(0)
    for n in (2, 3, 4):
        for _ in range(20):
            p = S.random_point(n, rng)
            assert S.det_exact(p.metric()) > 0
    with pytest.raises(InvalidPoint):
        S.normal_point(2, y11=-1)


# -- properties --------------------------------------------------------------


@given(exprs(2), coords_of(2), coords_of(2), jet_points(2))
def test_mixed_partials_commute(e, a, b, p):
    lhs = S.partial(S.partial(e, a), b)
    rhs = S.partial(S.partial(e, b), a)
    assert S.evaluate(lhs, p) == S.evaluate(rhs, p)


@given(exprs(2, allow_quotient=True), coords_of(2), jet_points(2))
def test_partial_matches_dual_numbers(e, c, p):
    # oracle: forward-mode derivative of the evaluation map
    vals = dict(p.values)
    vals[c] = Dual(vals[c], 1)
    out = S.Evaluator(vals)(e)
    eps = out.b if isinstance(out, Dual) else 0
    assert S.evaluate(S.partial(e, c), p) == eps


def _poly_degree_in(e, c):
    return max((k for mono in S.to_poly(e) for cc, k in mono if cc == c), default=0)


@given(exprs(2), coords_of(2), jet_points(2))
def test_partial_matches_difference_quotients(e, c, p):
    # for a polynomial, q(h) = (f(t+h) - f(t)) / h is a polynomial in h of
    # degree < deg f, so exact interpolation at deg f offsets recovers q(0) = f'(t)
    deg = _poly_degree_in(e, c)
    t = p.values[c]
    f0 = S.evaluate(e, p)
    hs = [Fraction(1, k + 2) for k in range(max(deg, 3))]
    qs = []
    for h in hs:
        vals = dict(p.values)
        vals[c] = t + S.Q(h)
        qs.append((S.evaluate(e, vals) - f0) / S.Q(h))
    at_zero = S.Q(0)
    for i, hi in enumerate(hs):
        w = S.Q(1)
        for j, hj in enumerate(hs):
            if i != j:
                w *= S.Q(-hj) / S.Q(hi - hj)
        at_zero += w * qs[i]
    assert S.evaluate(S.partial(e, c), p) == at_zero


def test_difference_quotient_converges_for_rational_function():
    e = S.quotient(coord(yc(0, 1)) ** 3, S.add(S.ONE, coord(xc(0)) ** 2))
    p = S.normal_point(2, x1="1/3", y12="1/5")
    exact = float(S.evaluate(S.partial(e, xc(0)), p))
    errs = []
    for k in (2, 4, 6):
        h = S.Q(1, 10**k)
        vals = dict(p.values)
        vals[xc(0)] += h
        errs.append(abs(float((S.evaluate(e, vals) - S.evaluate(e, p)) / h) - exact))
    assert errs[0] > errs[1] > errs[2]


@given(st.lists(exprs(2), min_size=2, max_size=4), jet_points(2), st.randoms())
def test_sum_and_product_are_order_insensitive(items, p, rnd):
    shuffled = list(items)
    rnd.shuffle(shuffled)
    assert S.evaluate(S.add_all(items), p) == S.evaluate(S.add_all(shuffled), p)
    assert S.evaluate(S.mul_all(items), p) == S.evaluate(S.mul_all(shuffled), p)


@given(exprs(2), jet_points(2))
def test_shared_nodes_evaluate_like_copies(e, p):
    shared = S.add(S.mul(e, e), e)
    v = S.evaluate(e, p)
    assert S.evaluate(shared, p) == v * v + v
