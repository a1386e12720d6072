import random

import pytest

from jetlc import charforms as CF
from jetlc import jet_actions as JA
from jetlc import scalar_expr as S
from jetlc.checking import SAMPLED, SYMBOLIC, random_vectors, symbolic_compare
from jetlc.errors import OddDimension, OutOfRange
from jetlc.forms import DiffForm, char_coeff
from jetlc.invariant_theory import reflection
from jetlc.scalar_expr import coord, jc, xc, yc

WITNESS = [{xc(0): 1}, {xc(1): 1}, {jc(0, 0, 1): 1}, {jc(0, 1, 1): 1}]


def test_out_of_range(ctx2, ctx3):
    with pytest.raises(OutOfRange):
        CF.pontryagin(ctx2, 2)
    with pytest.raises(OddDimension):
        CF.euler(ctx3)


def test_p1_closed_symbolic(ctx2):
    c = CF.check_closed_pontryagin(ctx2, 1, SYMBOLIC)
    assert c.passed and c.mode == SYMBOLIC


def test_p1_closed_sampled_n3(ctx3):
    assert CF.check_closed_pontryagin(ctx3, 1, SAMPLED, samples=5).passed


def test_closedness_controls(ctx2):
    # a coefficient in y12 makes the added 4-form non-closed
    bad = DiffForm.basis(xc(0), yc(0, 0), jc(0, 0, 1), xc(1), coeff=coord(yc(0, 1)))
    c = CF.check_closed_pontryagin(ctx2, 1, SYMBOLIC, perturbation=bad)
    assert not c.passed and c.witness is not None
    # with a y11 coefficient it is d(y11) ^ dy11 ^ ... = 0, so closedness survives
    literal = DiffForm.basis(xc(0), yc(0, 0), jc(0, 0, 1), xc(1), coeff=coord(yc(0, 0)))
    assert literal.dext().is_zero()
    assert CF.check_closed_pontryagin(ctx2, 1, SYMBOLIC, perturbation=literal).passed


def test_p1_witness(ctx2):
    c = CF.p1_nonvanishing_witness(ctx2)
    assert c.passed
    assert c.details["value"] == c.details["brute_force_value"] != "0/1"
    z = S.normal_point(2)
    assert CF.pontryagin_value(ctx2, 1, z.values, WITNESS) == S.Q("-1/2")
    assert CF.brute_force_p1_value(ctx2, z, WITNESS) == S.Q("-1/2")


def test_p1_symbolic_and_restricted_agree(ctx2):
    p1 = CF.pontryagin(ctx2, 1).rational_part
    rng = random.Random(4)
    for _ in range(5):
        p = S.random_point(2, rng)
        vecs = random_vectors(2, 4, rng)
        assert p1.evaluate(p, vecs) == CF.pontryagin_value(ctx2, 1, p.values, vecs)


def test_flat_pullbacks(ctx2):
    flat = JA.euclidean_metric(2)
    assert JA.holonomic_pullback(flat, CF.pontryagin(ctx2, 1).rational_part).is_zero()
    pair = CF.euler(ctx2)
    assert JA.holonomic_pullback(flat, pair.pf_flat).is_zero()


def test_euler_pair_shape(ctx2, ctx4):
    pair = CF.euler(ctx2)
    assert pair.two_pi_power == -1 and pair.pf_flat.degree == 2
    assert CF.check_lowered_antisymmetric(ctx2, SYMBOLIC).passed
    assert CF.check_lowered_antisymmetric(ctx4, SAMPLED, samples=5).passed


def test_lowered_antisymmetric_n3(ctx3):
    # the lowering step itself works in odd dimension; only the Pfaffian needs n even
    assert symbolic_compare("", 3, ctx3.lower(ctx3.curvature) + ctx3.lower(ctx3.curvature).T,
                            ctx3.lower(ctx3.curvature).scale(0)).passed


def test_euler_closed_and_square_n2(ctx2):
    assert CF.check_euler_closed(ctx2, SYMBOLIC).passed
    assert CF.check_euler_square(ctx2, SYMBOLIC).passed


def test_euler_closedness_control(ctx2):
    bad = DiffForm.basis(xc(0), yc(0, 0), coeff=coord(yc(0, 1)))
    assert not CF.check_euler_closed(ctx2, SYMBOLIC, perturbation=bad).passed


def test_euler_square_n4_sampled(ctx4):
    assert CF.check_euler_square(ctx4, SAMPLED, samples=3).passed


def test_sign_flip(ctx2):
    flip = JA.affine_diffeo(reflection(2), name="diag(-1,1)")
    c = CF.check_euler_sign_flip(ctx2, flip, 10)
    assert c.passed and c.details["orientation_sign"] == -1
    rot = JA.affine_diffeo([["3/5", "-4/5"], ["4/5", "3/5"]])
    c = CF.check_euler_sign_flip(ctx2, rot, 5)
    assert c.passed and c.details["orientation_sign"] == 1
    c = CF.check_euler_sign_flip(ctx2, flip.compose(flip), 5)
    assert c.passed and c.details["orientation_sign"] == 1


def test_holonomic_euler_gauss_curvature(ctx2):
    g = JA.diagonal_metric([S.ONE, 1 + coord(xc(0)) ** 2], [(0, 0)])
    assert CF.holonomic_euler_density(ctx2, g, (0, 0)) == (-1, 1)
    assert CF.check_holonomic_euler(ctx2, g, [(0, 0), (S.Q("1/2"), 1)]).passed


@pytest.mark.parametrize("idx", [2, 6, 9])
def test_pontryagin_invariance(ctx2, idx):
    phi = JA.standard_diffeos(2)[idx]
    assert CF.check_pontryagin_invariance(ctx2, phi, 1, samples=5).passed


def test_holonomic_p1_matches_classical_n4(ctx4):
    g = JA.standard_metrics(4, points=2)[0]
    assert CF.check_holonomic_pontryagin(ctx4, g, g.sample_points[:1], 1).passed


def test_char_coeff_of_curvature_matches_pontryagin(ctx2):
    assert char_coeff(1, ctx2.curvature).form == CF.pontryagin(ctx2, 1).rational_part
