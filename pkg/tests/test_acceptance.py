"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the lines are printed with
output capture disabled so they appear in the log either way.
"""
import json
import math
import random
import time
from collections import defaultdict

import pytest

from twistpoints.arith import squarefree_part, squarefree_sieve
from twistpoints.config import ScanConfig
from twistpoints.curve import IntegralPoint, TwistCurve
from twistpoints.descent import (
    ETA,
    Label,
    big_G,
    big_G_even,
    candidate_quadruples,
    classify_quadruple,
    locally_solvable,
    point_to_quadruple,
    positive_representative,
    select_M,
    selmer_enumerate,
    theta,
    torsion_conditions,
)
from twistpoints.quartic import Quartic, act, invariants, mordell_quartic, seminvariants, syzygy_check
from twistpoints.reduction import (
    cremona_reduce,
    in_reduced_range,
    psi_reduce,
    syzygy_point,
    torsion_image_test,
)
from twistpoints.search import SearchConfig, enumerate_all
from twistpoints.stats import ek_tail_fraction


@pytest.fixture
def report(capsys):
    def emit(tag, ok, detail=""):
        with capsys.disabled():
            print(f"\nACCEPTANCE {tag}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
        assert ok, detail

    return emit


def _both_signs(points):
    for P in points:
        yield P
        yield IntegralPoint(P.x, -P.y)


def _admissible_M(D, c):
    return [M for M in range(1, D + 1) if D % M == 0 and math.gcd(M, 2 * c) == 1]


@pytest.fixture(scope="module")
def psi_pipeline(points_upto_500):
    """Every (D, P, M, F, reduced rep) over D <= 500, both signs, all admissible M."""
    rows = []
    for D, pts in points_upto_500.items():
        curve = TwistCurve(D)
        for P in _both_signs(pts):
            for M in _admissible_M(D, P.x):
                res = psi_reduce(curve, P, M)
                rows.append((D, P, M, res, cremona_reduce(res.F)))
    return rows


# 1 -------------------------------------------------------------------------

GOLDEN_POINTS = {
    5: {(-4, 6), (-4, -6), (45, 300), (45, -300)},
    6: {(-3, 9), (-3, -9), (12, 36), (12, -36), (18, 72), (18, -72), (294, 5040), (294, -5040)},
    1: set(),
    2: set(),
    3: set(),
}


def _signed(points):
    return {(P.x, s * P.y) for P in points for s in (1, -1)}


def test_1_enumeration_goldens(report):
    t0 = time.perf_counter()
    found = {D: _signed(enumerate_all(TwistCurve(D), SearchConfig(x_bound=10**6)).points) for D in GOLDEN_POINTS}
    elapsed = time.perf_counter() - t0
    bad = {D: sorted(found[D] ^ want) for D, want in GOLDEN_POINTS.items() if found[D] != want}
    report("#1 enumeration goldens", not bad and elapsed < 10, f"({elapsed:.2f}s; mismatches {bad})")


def test_1_supplement_corrected_d6(report):
    # (-2, 8) satisfies 64 = -8 + 72; both enumerators and a plain loop agree
    want = GOLDEN_POINTS[6] | {(-2, 8), (-2, -8)}
    plain = {(x, s * math.isqrt(x**3 - 36 * x)) for x in list(range(-6, 1)) + list(range(6, 10**5))
             if x**3 - 36 * x > 0 and math.isqrt(x**3 - 36 * x) ** 2 == x**3 - 36 * x for s in (1, -1)}
    found = _signed(enumerate_all(TwistCurve(6)).points)
    report("#1 supplement D=6 with (-2,+-8)", found == want and {p for p in want if p[0] < 10**5} == plain)


# 2 -------------------------------------------------------------------------


def test_2_syzygy(report, points_upto_500):
    rng = random.Random(20240611)
    bad_random = 0
    for _ in range(10**4):
        f = Quartic(*(rng.randint(-(10**6), 10**6) for _ in range(5)))
        bad_random += not syzygy_check(f)
    bad_points = checked = 0
    for D, pts in points_upto_500.items():
        curve = TwistCurve(D)
        for P in _both_signs(pts):
            f = mordell_quartic(curve, P)
            I, J, _ = invariants(f)
            a, H, R = seminvariants(f)
            ok = syzygy_check(f) and (I, J, a, H, R) == (4 * D * D, 0, 1, P.x, 2 * P.y)
            ok = ok and P.y**2 == P.x**3 - D * D * P.x
            bad_points += not ok
            checked += 1
    report("#2 syzygy", bad_random == 0 and bad_points == 0 and checked > 0,
           f"(10000 random forms, {bad_random} bad; {checked} f_P, {bad_points} bad)")


# 3 -------------------------------------------------------------------------


def test_3_psi_golden(report):
    res = psi_reduce(TwistCurve(5), IntegralPoint(-4, 6), 5)
    want = Quartic(5, 11, 25, 59, 145)
    ok = res.k % 125 == 11 and res.F == want and res.F(1, 0) == 5 and invariants(res.F) == (4, 0, 64)
    report("#3 Psi golden", ok, f"(k={res.k}, F={res.F})")


# 4 -------------------------------------------------------------------------


def test_4_psi_postconditions(report, psi_pipeline):
    rows = [r for r in psi_pipeline if r[0] <= 200]
    bad = 0
    for D, P, M, res, _ in rows:
        Dt = D // M
        bad += not (res.F(1, 0) == M and res.F.is_integer_matrix and invariants(res.F) == (4 * Dt * Dt, 0, 64 * Dt**6))
    report("#4a Psi postconditions", bad == 0 and rows, f"({len(rows)} outputs, {bad} bad)")


def test_4_psi_injectivity(report, psi_pipeline):
    classes = defaultdict(list)
    forms = defaultdict(list)
    for D, P, M, res, rep in psi_pipeline:
        if D <= 200:
            classes[(D, rep.g.a, M)].append(P)
            forms[(D, res.F.a, M)].append(P)
    collisions = {k: v for k, v in classes.items() if len(v) > 1}
    form_collisions = sum(len(v) > 1 for v in forms.values())
    sample = next(iter(collisions.items()), None)
    report("#4b Psi injectivity into (reduced class, M)", not collisions,
           f"({len(collisions)} colliding classes, e.g. {sample}; map into forms has {form_collisions} collisions)")


# 5 -------------------------------------------------------------------------


def test_5_descent_identities(report, points_upto_500):
    bad = []
    for D in squarefree_sieve(200).values.tolist():
        curve = TwistCurve(D)
        sel = selmer_enumerate(D)
        n = len(sel)
        if n < 4 or n & (n - 1):
            bad.append((D, "size", n))
        for P in _both_signs(points_upto_500[D]):
            q, w = point_to_quadruple(curve, P)
            if q.theta() != theta(curve, P) or not w.satisfies(q) or q not in sel:
                bad.append((D, P))
    report("#5 descent identities", not bad, f"(squarefree D <= 200; failures {bad[:5]})")


# 6 -------------------------------------------------------------------------


def test_6_G_oracle(report):
    t0 = time.perf_counter()
    odd_bad = even_bad = odd_n = even_n = 0
    for D in squarefree_sieve(202).values.tolist():
        for q in candidate_quadruples(D, positive_only=True):
            if q.product != D:
                continue
            ls = int(locally_solvable(q))
            if D % 2:
                if D <= 201:
                    odd_n += 1
                    odd_bad += big_G(*q.entries) != ls
            else:
                even_n += 1
                s = next(i for i, v in enumerate(q.entries, start=1) if v % 2 == 0)
                odds = tuple(v // 2 if v % 2 == 0 else v for v in q.entries)
                even_bad += not big_G_even(*odds, s=s) >= ls
    elapsed = time.perf_counter() - t0
    ok = odd_bad == 0 and even_bad == 0 and elapsed < 600
    report("#6 G oracle", ok, f"({odd_n} odd quadruples, {odd_bad} bad; {even_n} even, {even_bad} bad; {elapsed:.1f}s)")


# 7 -------------------------------------------------------------------------


def test_7_reduction_box(report, psi_pipeline):
    bad = 0
    for D, P, M, res, rep in psi_pipeline:
        Dt = res.Dtilde
        box = abs(rep.a) <= 8 * Dt / 3 and abs(rep.H) <= 4 * Dt * Dt / 3 and in_reduced_range(rep.a, rep.H, Dt)
        sp = syzygy_point(rep)
        on = sp.n == abs(rep.a * Dt) and sp.y**2 == sp.x**3 - sp.n**2 * sp.x
        bad += not (box and act(rep.transform, res.F) == rep.g and rep.transform.is_unimodular and on)
    report("#7 reduction box", bad == 0 and psi_pipeline, f"({len(psi_pipeline)} quartics, {bad} bad)")


# 8 -------------------------------------------------------------------------


@pytest.fixture(scope="module")
def scan_10k(tmp_path_factory):
    """Default-horizon scans at N = 10^4 and 2500 through the CLI, timed."""
    from twistpoints.cache import read_cache
    from twistpoints.cli import main

    out = {}
    for N in (10**4, 2500):
        d = tmp_path_factory.mktemp(f"scan{N}")
        t0 = time.perf_counter()
        code = main(["scan", "--nmax", str(N), "--out", str(d)])
        out[N] = {
            "code": code,
            "elapsed": time.perf_counter() - t0,
            "summary": json.loads((d / "summary.json").read_text()),
            "records": read_cache(d / "cache.jsonl").records,
        }
    return out


def _printed_conditions(q):
    D1, D2, D3 = q[:3]
    return (squarefree_part(D1 * D2) == 2, squarefree_part(D2 * D3) == -1, squarefree_part(D1 * D3) == -2)


def _s1_points(points_upto_500, N=500):
    cfg = ScanConfig()
    out = []
    for D, pts in points_upto_500.items():
        curve = TwistCurve(D)
        for P in pts:
            _, pos, _ = positive_representative(curve, P)
            if classify_quadruple(pos, D, N, cfg.eps, cfg.C(N)) is Label.S1:
                out.append((D, P, point_to_quadruple(curve, P)[0]))
    return out


def test_8_torsion_exclusion(report, points_upto_500):
    # S1 needs a window prime in each of four coprime entries, so D >= 5*7*11*13
    # at N = 500; the set is empty and the statement holds vacuously.
    s1 = _s1_points(points_upto_500)
    hits = [q for _, _, q in s1 if any(_printed_conditions(q.entries)) or any(torsion_conditions(q))]
    for _, _, q in s1:
        select_M(q, 500, ScanConfig().eps)
    report("#8 torsion exclusion (D <= 500)", not hits,
           f"({len(s1)} S1 points{'; vacuous, S1 needs D >= 5005 here' if not s1 else ''}; {len(hits)} meet a condition)")


def test_8_supplement_scan_s1(report, scan_10k, psi_pipeline):
    s1 = [(D, p) for D, r in scan_10k[10**4]["records"].items() for p in r["points"] if p["label"] == "S1"]
    printed = [any(_printed_conditions([int(v) for v in p["quadruple"]])) for _, p in s1]
    derived = [any(p["torsion_conditions"]) for _, p in s1]
    syz_torsion = [q["torsion"] for _, p in s1 for q in p["psi"]]
    # every torsion syzygy point in the D <= 500 pipeline sits in a case its square classes allow
    torsion_rows = [r for r in psi_pipeline if syzygy_point(r[4]).is_torsion]
    consistent = all(
        torsion_image_test(P.x, D)[{rep.a * res.Dtilde: 0, 0: 1, -rep.a * res.Dtilde: 2}[rep.H]]
        for D, P, M, res, rep in torsion_rows
    )
    ok = s1 and not any(printed) and not any(derived) and not any(syz_torsion) and len(syz_torsion) == 2 * len(s1)
    report("#8 supplement S1 points of the N=10^4 scan", bool(ok and consistent),
           f"({len(s1)} S1 points at D {sorted({D for D, _ in s1})}; printed/derived conditions met "
           f"{sum(printed)}/{sum(derived)}; {len(syz_torsion)} Psi runs, {sum(syz_torsion)} torsion; "
           f"{len(torsion_rows)} torsion syzygy points in the D <= 500 pipeline, case-consistent: {consistent})")


# 9 -------------------------------------------------------------------------


def test_9_statistics(report):
    table = squarefree_sieve(10**6)
    ek = ek_tail_fraction(10**6, 0.523567, table)
    report("#9a statistics", ek <= 0.7 and len(table) == 607926,
           f"(ek_tail={float(ek):.4f} <= 0.7, squarefree count {len(table)}; eta default {ETA:.10f})")


def test_9_scan_runtime(report, scan_10k):
    big, small = scan_10k[10**4], scan_10k[2500]
    ratio = int(big["summary"]["total_points"]) / int(small["summary"]["total_points"])
    trend = "inside" if 1.4 <= ratio <= 2.9 else "OUTSIDE"
    report("#9b scan N=10^4", big["code"] == 0 and small["code"] == 0 and big["elapsed"] < 900,
           f"({big['elapsed']:.1f}s, N=2500 in {small['elapsed']:.1f}s; failed D {big['summary']['failed']}; "
           f"sum {big['summary']['total_points']}/{small['summary']['total_points']} = {ratio:.3f}, "
           f"{trend} [1.4, 2.9], report only)")
