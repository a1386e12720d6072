"""Search coordinate-vector 4-tuples for a nonzero value of p_1(Omega) in n = 2.

Each hit is cross-checked with the brute-force multilinear evaluator.

    python3 scripts/find_p1_witness.py [--point normal|random] [--limit 5]
"""
import argparse
import itertools
import random

from jetlc import charforms as CF
from jetlc import scalar_expr as S
from jetlc.geometry import build_context


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--point", choices=("normal", "random"), default="normal")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--limit", type=int, default=5)
    a = ap.parse_args()
    ctx = build_context(2)
    p = S.normal_point(2) if a.point == "normal" else S.random_point(2, random.Random(a.seed))
    found = 0
    for combo in itertools.combinations(S.coordinates(2), 4):
        vecs = [{c: 1} for c in combo]
        v = CF.pontryagin_value(ctx, 1, p.values, vecs)
        if v == 0:
            continue
        brute = CF.brute_force_p1_value(ctx, p, vecs)
        names = ", ".join("d/d" + c.name for c in combo)
        print(f"p_1({names}) = {S.fraction_str(v)}  brute force {S.fraction_str(brute)}"
              f"  {'agree' if v == brute else 'DISAGREE'}")
        found += 1
        if found >= a.limit:
            break
    if not found:
        print("no nonzero coordinate 4-tuple at this point")


if __name__ == "__main__":
    main()
