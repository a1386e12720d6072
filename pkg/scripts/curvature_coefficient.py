"""Solve for c in Omega = (Omega_hor)_A + c vartheta^vartheta from one evaluation.

At the normal point, on (d/dy11, d/dy12), the (1,2) entry of vartheta^vartheta is 1
and (Omega_hor)_A vanishes, so the entry of Omega is c itself. The candidate is
then checked as a full identity.
"""
import sys

from jetlc import scalar_expr as S
from jetlc.checking import SAMPLED, SYMBOLIC
from jetlc.forms import mat_wedge
from jetlc.geometry import build_context, verify_curvature_identity
from jetlc.scalar_expr import yc


def main():
    ctx = build_context(2)
    z = S.normal_point(2)
    vecs = [{yc(0, 0): 1}, {yc(0, 1): 1}]
    tt = mat_wedge(ctx.vartheta, ctx.vartheta).entries[0][1].evaluate(z, vecs)
    hor = ctx.antisym_part(ctx.curvature_hor).entries[0][1].evaluate(z, vecs)
    om = ctx.curvature.entries[0][1].evaluate(z, vecs)
    c = (om - hor) / tt
    print(f"vartheta^vartheta = {tt}, (Omega_hor)_A = {hor}, Omega = {om}  =>  c = {S.fraction_str(c)}")
    for n in (2, 3):
        main_check, _ = verify_curvature_identity(build_context(n), SYMBOLIC if n == 2 else SAMPLED, coeff=c)
        print(f"n={n}: identity with c = {S.fraction_str(c)}: {'holds' if main_check.passed else 'fails'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
