"""Spot-check the exact identities on random inputs and print counts.

    python scripts/check_identities.py --forms 100000 --dmax 300 --seed 1
"""
import argparse
import random

from twistpoints.arith import squarefree_sieve
from twistpoints.curve import TwistCurve
from twistpoints.descent import point_to_quadruple, selmer_enumerate, theta
from twistpoints.quartic import Quartic, syzygy_check
from twistpoints.reduction import cremona_reduce, in_reduced_range, psi_reduce, syzygy_point
from twistpoints.search import SearchConfig, enumerate_all


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--forms", type=int, default=10**4)
    ap.add_argument("--coef", type=int, default=10**6, help="bound on |a_i|")
    ap.add_argument("--dmax", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    bad = sum(
        not syzygy_check(Quartic(*(rng.randint(-args.coef, args.coef) for _ in range(5))))
        for _ in range(args.forms)
    )
    print(f"syzygy: {args.forms} random forms, {bad} failures")

    failures = points = quartics = 0
    for D in squarefree_sieve(args.dmax).values.tolist():
        curve = TwistCurve(D)
        sel = selmer_enumerate(D)
        for P in enumerate_all(curve, SearchConfig()).points:
            points += 1
            q, w = point_to_quadruple(curve, P)
            failures += q.theta() != theta(curve, P) or not w.satisfies(q) or q not in sel
            for M in (m for m in range(1, D + 1) if D % m == 0):
                try:
                    res = psi_reduce(curve, P, M)
                except ValueError:
                    continue
                rep = cremona_reduce(res.F)
                syzygy_point(rep)
                quartics += 1
                failures += not in_reduced_range(rep.a, rep.H, rep.Dtilde)
    print(f"descent/reduction: D <= {args.dmax}, {points} points, {quartics} reduced quartics, {failures} failures")
    return 1 if bad or failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
