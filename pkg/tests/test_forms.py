import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from jetlc import scalar_expr as S
from jetlc.checking import symbolic_compare
from jetlc.errors import DegreeMismatch, NotAntisymmetric, OddDimension, OutOfRange
from jetlc.forms import (
    DiffForm,
    MatrixForm,
    PrefactoredForm,
    antisym_part,
    char_coeff,
    mat_wedge,
    pfaffian,
    sym_part,
    transpose_g,
    wedge_det,
)
from jetlc.scalar_expr import coord, jc, xc, yc
from jetlc.suites import _conj, random_invertible, random_numeric_antisymmetric

from conftest import forms, jet_points, small_rationals, tangent_vectors

dx1, dx2 = DiffForm.d(xc(0)), DiffForm.d(xc(1))


def same(a, b, n=2):
    return symbolic_compare("eq", n, a, b, trials=10).passed


def num2(i, j):
    """Constant 2-form e_i ^ e_j on R^m (integer labels)."""
    return DiffForm(2, {(i, j): S.Q(1)})


def test_wedge_examples():
    assert dx1.wedge(dx2).terms == {(xc(0), xc(1)): S.ONE}
    assert dx1.wedge(dx1).is_zero()
    assert dx2.wedge(dx1) == -dx1.wedge(dx2)


def test_dext_examples():
    assert DiffForm.scalar(coord(yc(0, 0))).dext() == DiffForm.d(yc(0, 0))
    # d(dy11 - y11,k dx^k) = -sum_k dy11,k ^ dx^k
    theta11 = DiffForm.d(yc(0, 0)) - DiffForm.d(xc(0), coord(jc(0, 0, 0))) - DiffForm.d(xc(1), coord(jc(0, 0, 1)))
    expected = -(DiffForm.d(jc(0, 0, 0)).wedge(dx1) + DiffForm.d(jc(0, 0, 1)).wedge(dx2))
    assert theta11.dext() == expected


def test_evaluate_examples():
    p = S.normal_point(2)
    f = dx1.wedge(dx2)
    assert f.evaluate(p, [{xc(0): 1}, {xc(1): 1}]) == 1
    assert f.evaluate(p, [{xc(1): 1}, {xc(0): 1}]) == -1
    with pytest.raises(DegreeMismatch):
        f.evaluate(p, [{xc(0): 1}])


def test_keys_are_sorted_and_nonzero():
    f = DiffForm.basis(yc(0, 0), xc(1), coeff=S.const(3)) + DiffForm.basis(xc(1), yc(0, 0), coeff=S.const(3))
    assert f.is_zero()
    g = DiffForm.basis(jc(0, 1, 0), yc(0, 0), xc(1))
    (key,) = g.terms
    assert list(key) == sorted(key)


def test_mat_wedge(ctx2):
    ident = MatrixForm.identity(2)
    assert same(mat_wedge(ident, ctx2.vartheta), ctx2.vartheta)
    tt = mat_wedge(ctx2.vartheta, ctx2.vartheta)
    val = tt.entries[0][1].evaluate(S.normal_point(2), [{yc(0, 0): 1}, {yc(0, 1): 1}])
    assert val == 1


@given(st.lists(forms(2, 1, 2), min_size=8, max_size=8))
def test_mat_wedge_matches_triple_loop(fs):
    a = MatrixForm([fs[0:2], fs[2:4]], 1)
    b = MatrixForm([fs[4:6], fs[6:8]], 1)
    ab = mat_wedge(a, b)
    for i in range(2):
        for j in range(2):
            brute = a.entries[i][0].wedge(b.entries[0][j]) + a.entries[i][1].wedge(b.entries[1][j])
            assert same(ab.entries[i][j], brute)


def test_transpose_g(ctx2):
    g, gi = ctx2.g, ctx2.g_inv
    assert same(transpose_g(ctx2.vartheta, g, gi), ctx2.vartheta)
    assert same(sym_part(ctx2.vartheta, g, gi), ctx2.vartheta)
    assert same(antisym_part(ctx2.vartheta, g, gi), MatrixForm.zero(2, 1))
    ident = [[S.ONE, S.ZERO], [S.ZERO, S.ONE]]
    a = MatrixForm([[dx1, dx2], [DiffForm.d(yc(0, 0)), DiffForm.zero(1)]], 1)
    assert same(transpose_g(a, ident, ident), a.T)


@given(st.lists(forms(2, 1, 2), min_size=4, max_size=4))
def test_sym_antisym_decomposition(ctx2, fs):
    a = MatrixForm([fs[0:2], fs[2:4]], 1)
    g, gi = ctx2.g, ctx2.g_inv
    s, t = sym_part(a, g, gi), antisym_part(a, g, gi)
    assert same(s + t, a)
    assert same(transpose_g(transpose_g(a, g, gi), g, gi), a)
    assert same(sym_part(s, g, gi), s)
    assert same(sym_part(t, g, gi), MatrixForm.zero(2, 1))


def test_pfaffian_examples():
    a, b = num2(0, 1), num2(2, 3)
    z = DiffForm.zero(2)
    assert pfaffian([[z, a], [-a, z]]) == a
    block = [[z, a, z, z], [-a, z, z, z], [z, z, z, b], [z, z, -b, z]]
    assert pfaffian(block) == a.wedge(b)
    with pytest.raises(OddDimension):
        pfaffian([[z] * 3 for _ in range(3)])
    with pytest.raises(NotAntisymmetric):
        pfaffian([[z, a], [a, z]])


@pytest.mark.parametrize("seed", range(10))
def test_pfaffian_congruence(seed):
    rng = random.Random(seed)
    A = random_numeric_antisymmetric(4, 8, rng)
    B = random_invertible(4, rng)
    Bt = [list(r) for r in zip(*B)]
    assert pfaffian(_conj(Bt, A, B)) == pfaffian(A).scale(S.det_exact(B))


@pytest.mark.parametrize("m", [2, 4])
def test_pfaffian_square_is_determinant(m):
    rng = random.Random(m)
    A = random_numeric_antisymmetric(m, 2 * m, rng)
    pf = pfaffian(A)
    assert pf.wedge(pf) == wedge_det(A)


def test_char_coeff_examples():
    z = DiffForm.zero(2)
    a, b = num2(0, 1), num2(2, 3)
    assert char_coeff(1, [[z, z], [z, z]]).form.is_zero()
    p1 = char_coeff(1, [[z, a], [-a, z]])
    assert p1.two_pi_power == -2
    assert p1.form == a.wedge(a)  # = 0 for a decomposable 2-form
    block = [[z, a, z, z], [-a, z, z, z], [z, z, z, b], [z, z, -b, z]]
    p2 = char_coeff(2, block)
    pf = pfaffian(block)
    assert p2.two_pi_power == -4 and p2.form == pf.wedge(pf)
    with pytest.raises(OutOfRange):
        char_coeff(2, [[z, a], [-a, z]])


@pytest.mark.parametrize("seed", range(6))
def test_char_coeff_conjugation_invariance(seed):
    rng = random.Random(seed)
    n = 4 if seed % 2 else 3
    A = random_numeric_antisymmetric(n, 2 * n, rng)
    # add a symmetric part: char_coeff is defined for any 2-form matrix
    for i in range(n):
        A[i][i] = num2(rng.randrange(2 * n - 1), 2 * n - 1)
    B = random_invertible(n, rng)
    C = _conj(B, A, S.inverse_exact(B))
    for k in range(1, n // 2 + 1):
        assert char_coeff(k, C).form == char_coeff(k, A).form


def test_prefactored_arithmetic():
    a = PrefactoredForm(-2, num2(0, 1))
    b = PrefactoredForm(-2, num2(2, 3))
    assert a.wedge(b).two_pi_power == -4
    assert (a + b).form == num2(0, 1) + num2(2, 3)
    with pytest.raises(ValueError):
        a + a.wedge(b)


# -- properties --------------------------------------------------------------


@given(st.integers(0, 2), st.integers(0, 2), st.data())
def test_graded_commutativity(p, q, data):
    a, b = data.draw(forms(2, p)), data.draw(forms(2, q))
    assert same(a.wedge(b), b.wedge(a).scale((-1) ** (p * q)))


@given(st.data())
def test_wedge_associativity(data):
    a, b, c = (data.draw(forms(2, data.draw(st.integers(0, 2)))) for _ in range(3))
    assert same(a.wedge(b).wedge(c), a.wedge(b.wedge(c)))


@given(st.integers(0, 3), st.data())
def test_d_squared_is_zero(p, data):
    a = data.draw(forms(2, p))
    assert same(a.dext().dext(), DiffForm.zero(p + 2))


@given(forms(3, 1, 2), forms(3, 2, 2))
def test_leibniz(a, b):
    assert same(a.wedge(b).dext(), a.dext().wedge(b) - a.wedge(b.dext()), 3)


@given(st.integers(1, 3), st.data())
def test_evaluate_is_alternating_and_multilinear(p, data):
    a = data.draw(forms(2, p))
    pt = data.draw(jet_points(2))
    vecs = data.draw(tangent_vectors(2, p))
    base = a.evaluate(pt, vecs)
    for perm in itertools.permutations(range(p)):
        sign = S._perm_sign(perm)
        assert a.evaluate(pt, [vecs[i] for i in perm]) == sign * base
    w = data.draw(tangent_vectors(2, 1))[0]
    c = data.draw(small_rationals)
    mixed = {k: c * vecs[0].get(k, 0) + w.get(k, 0) for k in set(vecs[0]) | set(w)}
    assert a.evaluate(pt, [mixed] + vecs[1:]) == c * base + a.evaluate(pt, [w] + vecs[1:])


@given(st.integers(1, 3), st.data())
def test_restriction_commutes_with_wedge(p, data):
    a, b = data.draw(forms(2, p)), data.draw(forms(2, 1))
    pt = data.draw(jet_points(2))
    vecs = data.draw(tangent_vectors(2, p + 1))
    lhs = a.wedge(b).restrict(pt, vecs)
    rhs = a.restrict(pt, vecs).wedge(b.restrict(pt, vecs))
    assert lhs == rhs
    assert lhs.top_value() == a.wedge(b).evaluate(pt, vecs)


def test_json_roundtrip():
    f = dx1.wedge(DiffForm.d(yc(0, 1), S.const(S.Q("2/3"))))
    data = f.to_json()
    assert data == {"degree": 2, "terms": {"dx1^dy12": "2/3"}}
    assert DiffForm.from_json(data) == f
