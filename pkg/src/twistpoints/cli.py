"""Command-line interface: ``python -m twistpoints <command> ...``.

Exit codes: 0 success, 1 internal failure, 2 invalid input (for example a
non-squarefree d or a torsion point), 3 corrupt cache lines were found.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from . import __version__
from .arith import is_squarefree, squarefree_sieve
from .cache import CacheConflict, append_record, merge_caches, read_cache, write_cache
from .config import ScanConfig, load_config
from .curve import IntegralPoint, TwistCurve, on_curve
from .descent import (
    big_G,
    candidate_quadruples,
    classify_quadruple,
    is_torsion_class,
    locally_solvable,
    point_to_quadruple,
    positive_representative,
    select_M,
    theta,
)
from .quartic import invariants, mordell_quartic, seminvariants, syzygy_check
from .reduction import cremona_reduce, psi_reduce, syzygy_point
from .search import enumerate_all
from .stats import SCHEMA, process_D, record_matches, summarize

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CORRUPT = 0, 1, 2, 3


class InputError(ValueError):
    pass


def _curve(d: int) -> TwistCurve:
    if d < 1 or not is_squarefree(d):
        raise InputError(f"d={d} is not a positive squarefree integer")
    return TwistCurve(d)


def _point(curve: TwistCurve, x: int, y: int) -> IntegralPoint:
    P = IntegralPoint(x, y)
    if not on_curve(curve, P):
        raise InputError(f"({x}, {y}) is not on E_{curve.D}")
    if y == 0:
        raise InputError("torsion point (y = 0) rejected")
    return P


def _config(args) -> ScanConfig:
    try:
        cfg = load_config(getattr(args, "config", None))
        return cfg.with_overrides(
            x_bound=getattr(args, "x_bound", None),
            X_bound=getattr(args, "X_bound", None),
            method=getattr(args, "method", None),
            eps=getattr(args, "eps", None),
            kappa=getattr(args, "kappa", None),
            constants=getattr(args, "constants", None),
        )
    except (OSError, ValueError) as exc:
        raise InputError(f"bad configuration: {exc}") from exc


def cmd_points(args) -> int:
    curve = _curve(args.d)
    cfg = _config(args)
    res = enumerate_all(curve, cfg.search)
    print(f"# E_{curve.D}: y^2 = x^3 - {curve.D**2}x; complete for x <= {res.complete_up_to}")
    for P in res.points:
        print(f"({P.x}, {P.y})")
    return EXIT_OK


def cmd_quartic(args) -> int:
    curve = _curve(args.d)
    P = _point(curve, args.x, args.y)
    f = mordell_quartic(curve, P)
    I, J, disc = invariants(f)
    a, H, R = seminvariants(f)
    print(f"f_P = {f}")
    print(f"I = {I}, J = {J}, disc = {disc}")
    print(f"a = {a}, H = {H}, R = {R}")
    print(f"syzygy holds: {syzygy_check(f)}")
    return EXIT_OK


def _stage(name, fn, *a):
    try:
        return fn(*a)
    except Exception as exc:
        raise RuntimeError(f"stage {name}: {type(exc).__name__}: {exc}") from exc


def cmd_descend(args) -> int:
    curve = _curve(args.d)
    P = _point(curve, args.x, args.y)
    cfg = _config(args)
    N = max(args.n, 16)
    q, w = _stage("descent", point_to_quadruple, curve, P)
    print(f"quadruple = {q} {q.variant.value}")
    print(f"witness (X,Y,Z,W) = ({w.X},{w.Y},{w.Z},{w.W})")
    print(f"theta = {theta(curve, P)}; (D1D2, D2D3, D1D3) = {q.theta()}")
    _, pos, _ = _stage("positive representative", positive_representative, curve, P)
    label = _stage("classification", classify_quadruple, pos, curve.D, N, cfg.eps, cfg.C(N))
    print(f"positive representative = {pos}; class at N={N} ({cfg.constants} constants) = {label.value}")
    if args.M is not None:
        M = args.M
    elif label.value == "S1":
        M = _stage("select_M", select_M, q, N, cfg.eps)
    else:
        print("no M selected (not S1; pass --M to force one)")
        return EXIT_OK
    res = _stage("psi", psi_reduce, curve, P, M)
    print(f"M = {M}, k = {res.k}, Dt = {res.Dtilde}")
    print(f"F = {res.F}")
    rep = _stage("reduction", cremona_reduce, res.F)
    print(f"g = {rep.g}  (transform {rep.transform.as_tuple()}, a = {rep.a}, H = {rep.H}, R = {rep.R})")
    sp = _stage("syzygy", syzygy_point, rep)
    kind = "torsion" if sp.is_torsion else "non-torsion"
    print(f"syzygy point = ({sp.x}, {sp.y}) on E_{sp.n} [{kind}]")
    return EXIT_OK


def cmd_selmer(args) -> int:
    curve = _curve(args.d)
    D = curve.D
    solvable = sorted(q for q in candidate_quadruples(D) if locally_solvable(q))
    print(f"# Sel_2(E_{D}) model: {len(solvable)} locally solvable quadruples")
    for q in solvable:
        tag = " torsion" if is_torsion_class(q) else ""
        print(f"{q} {q.variant.value}{tag}")
    if D % 2:
        print("# positive product-D quadruples: local solvability vs G")
        mismatches = 0
        for q in candidate_quadruples(D, positive_only=True):
            if q.product != D:
                continue
            ls, g = locally_solvable(q), big_G(*q.entries)
            mismatches += g != ls
            print(f"{q} solvable={int(ls)} G={g}")
        if mismatches:
            print(f"# {mismatches} mismatches", file=sys.stderr)
            return EXIT_FAIL
    return EXIT_OK


def _write_outputs(out: Path, summary):
    (out / "summary.json").write_text(json.dumps(summary.as_dict(), indent=2, sort_keys=True) + "\n")
    with open(out / "table.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["D", "omega", "omega_window", "points", "labels", "error"])
        for r in summary.records:
            labels = ";".join(p["label"] or "" for p in r["points"])
            om = "" if r["omega_window"] is None else r["omega_window"]
            wr.writerow([r["D"], r["omega"], om, 2 * len(r["points"]), labels, r["error"] or ""])


def cmd_scan(args) -> int:
    if args.nmax < 1:
        raise InputError("nmax must be at least 1")
    cfg = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cache_path = out / "cache.jsonl"
    cache = read_cache(cache_path)
    for lineno, _ in cache.corrupt:
        print(f"corrupt cache line {lineno} skipped", file=sys.stderr)
    N = args.nmax
    k, m = args.shard
    records, fresh = [], 0
    t0 = time.time()
    for i, D in enumerate(squarefree_sieve(N).values.tolist()):
        if i % m != k:
            continue
        rec = cache.records.get(D)
        if rec is None or not record_matches(rec, N, cfg):
            rec = process_D(D, N, cfg)
            append_record(cache_path, rec)
            fresh += 1
        records.append(rec)
    if cache.corrupt or fresh:
        write_cache(cache_path, records)
    if m > 1:
        print(f"N={N} shard {k}/{m}: {len(records)} curves ({fresh} computed), {time.time() - t0:.1f}s")
        return EXIT_CORRUPT if cache.corrupt else EXIT_OK
    summary = summarize(records, N, cfg)
    _write_outputs(out, summary)
    print(
        f"N={N}: {len(records)} curves ({fresh} computed, {len(records) - fresh} cached), "
        f"sum of #E*_D(Z) = {summary.total_points}, failed = {len(summary.failed)}, "
        f"{time.time() - t0:.1f}s"
    )
    return EXIT_CORRUPT if cache.corrupt else EXIT_OK


def cmd_merge(args) -> int:
    try:
        merged = merge_caches(args.shards)
    except CacheConflict as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    for where, _ in merged.corrupt:
        print(f"corrupt cache line {where} skipped", file=sys.stderr)
    write_cache(args.out, merged.records.values())
    print(f"merged {len(merged.records)} records into {args.out}")
    return EXIT_CORRUPT if merged.corrupt else EXIT_OK


def _shard(text: str) -> tuple[int, int]:
    try:
        k, m = (int(v) for v in text.split("/"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected K/M, got {text!r}") from None
    if not 0 <= k < m:
        raise argparse.ArgumentTypeError(f"need 0 <= K < M, got {text!r}")
    return k, m


def _add_search_flags(p):
    p.add_argument("--config", help="INI file with a [scan] section")
    p.add_argument("--x-bound", dest="x_bound", type=int)
    p.add_argument("--X-bound", dest="X_bound", type=int, help="descent parameter bound")
    p.add_argument("--method", choices=["brute", "descent", "both"])


def _add_class_flags(p):
    p.add_argument("--eps", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--constants", choices=["toy", "full"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twistpoints", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} (cache schema {SCHEMA})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("points", help="list integral points on E_d")
    p.add_argument("--d", type=int, required=True)
    _add_search_flags(p)
    p.set_defaults(func=cmd_points)

    p = sub.add_parser("quartic", help="quartic form attached to a point")
    for name in ("d", "x", "y"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.set_defaults(func=cmd_quartic)

    p = sub.add_parser("descend", help="full pipeline for one point")
    for name in ("d", "x", "y"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--n", type=int, default=10**4, help="scan size N used for classification")
    p.add_argument("--M", type=int, help="force this M instead of the selected one")
    p.add_argument("--config")
    _add_class_flags(p)
    p.set_defaults(func=cmd_descend)

    p = sub.add_parser("selmer", help="locally solvable descent quadruples")
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_selmer)

    p = sub.add_parser("scan", help="scan all squarefree D <= nmax")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--out", default="scan_out", help="output directory")
    p.add_argument("--shard", type=_shard, default=(0, 1), metavar="K/M",
                   help="process every M-th squarefree D starting at index K; cache only, no summary")
    _add_search_flags(p)
    _add_class_flags(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("merge", help="merge shard caches")
    p.add_argument("--out", required=True)
    p.add_argument("shards", nargs="+")
    p.set_defaults(func=cmd_merge)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
