"""Scan statistics and the per-D pipeline.

``process_D`` enumerates the points of one curve, runs every point through
descent and classification, and for S1 points through Psi, reduction and the
syzygy point. ``summarize`` turns a list of per-D records (plain dicts, the
cache format) into a ScanSummary; it never looks at anything else, so
summaries are reproducible from a cache alone.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .arith import (
    ResourceLimitError,
    factorize,
    in_window,
    omega,
    prime_window,
    primes_up_to,
    squarefree_divisors,
    squarefree_sieve,
)
from .config import ScanConfig, loglog
from .curve import IntegralPoint, TwistCurve
from .descent import (
    LAMBDA,
    log_B,
    Label,
    classify_quadruple,
    point_to_quadruple,
    positive_representative,
    select_M,
    torsion_conditions,
)
from .reduction import cremona_reduce, psi_reduce, syzygy_point, torsion_image_test
from .search import enumerate_all

SCHEMA = 1
# Below this the prime window and loglog-based tallies are undefined; points
# are still enumerated but left unclassified.
MIN_WINDOW_N = 16


def omega_window(D: int, N: int, eps: float) -> int:
    window = prime_window(N, eps)
    return sum(1 for p in factorize(D).primes if in_window(p, window)) if D > 1 else 0


def ek_tail_fraction(N: int, eta: float, table=None) -> Fraction:
    """Exact fraction of squarefree D <= N with |omega(D) - loglog N| >= eta loglog N."""
    if N < 16:
        raise ValueError(f"N must be >= 16, got {N}")
    table = table or squarefree_sieve(N)
    hist = np.bincount(table.omega)
    L = loglog(N)
    tail = sum(int(c) for w, c in enumerate(hist) if abs(w - L) >= eta * L)
    return Fraction(tail, len(table))


def ek_tail_fraction_direct(N: int, eta: float) -> Fraction:
    """Same quantity by factoring every n <= N; independent of the sieve."""
    if N < 16:
        raise ValueError(f"N must be >= 16, got {N}")
    L = loglog(N)
    total = tail = 0
    for n in range(1, N + 1):
        f = factorize(n)
        if any(e > 1 for _, e in f):
            continue
        total += 1
        tail += abs(len(f) - L) >= eta * L
    return Fraction(tail, total)


def window_omegas(N: int, eps: float, table=None) -> np.ndarray:
    """omega_S over the squarefree D <= N (aligned with the sieve table)."""
    table = table or squarefree_sieve(N)
    lo, hi = prime_window(N, eps)
    counts = np.zeros(N + 1, dtype=np.int64)
    for p in primes_up_to(min(N, math.ceil(hi))).tolist():
        if lo < p < hi:
            counts[p::p] += 1
    return counts[table.values]


def window_deficit_fraction(N: int, eps: float, lam: float = LAMBDA, table=None) -> Fraction:
    """Fraction of squarefree D <= N with fewer than lam*loglog N window primes."""
    table = table or squarefree_sieve(N)
    om = window_omegas(N, eps, table)
    return Fraction(int(np.count_nonzero(om < lam * loglog(N))), len(table))


def factor_count(n: int, cap: float, budget: int = 1 << 20) -> int:
    """Number of splittings n = a * Dt with Dt squarefree and omega(Dt) < cap."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > 1 and 2 ** omega(n) > budget:
        raise ResourceLimitError(f"{n} has too many squarefree divisors")
    return sum(1 for d in squarefree_divisors(n) if (omega(d) if d > 1 else 0) < cap)


# Per-D pipeline ---------------------------------------------------------------


def _ints(seq):
    return [str(v) for v in seq]


def _psi_record(curve: TwistCurve, P: IntegralPoint, M: int) -> dict:
    res = psi_reduce(curve, P, M)
    rep = cremona_reduce(res.F)
    sp = syzygy_point(rep)
    rec = {
        "y_sign": 1 if P.y > 0 else -1,
        "k": str(res.k),
        "F": _ints(res.F.a),
        "g": _ints(rep.g.a),
        "transform": _ints(rep.transform.as_tuple()),
        "a": str(rep.a),
        "H": str(rep.H),
        "R": str(rep.R),
        "n": str(sp.n),
        "case": rep.case,
        "torsion": sp.is_torsion,
    }
    if sp.is_torsion:
        allowed = torsion_image_test(P.x, curve.D)
        which = {rep.a * res.Dtilde: 0, 0: 1, -rep.a * res.Dtilde: 2}[rep.H]
        rec["torsion_case_allowed"] = allowed[which]
    return rec


def _point_record(curve: TwistCurve, P: IntegralPoint, N: int, cfg: ScanConfig) -> dict:
    D = curve.D
    raw, wit = point_to_quadruple(curve, P)
    _, pos, _ = positive_representative(curve, P)
    label = label_full = None
    if N >= MIN_WINDOW_N:
        label = classify_quadruple(pos, D, N, cfg.eps, cfg.C(N))
        label_full = classify_quadruple(pos, D, N, cfg.eps, cfg.full_C(N))
    rec = {
        "x": str(P.x),
        "y": str(P.y),
        "quadruple": _ints(raw.entries),
        "variant": raw.variant.value,
        "witness": _ints((wit.X, wit.Y, wit.Z, wit.W)),
        "positive": _ints(pos.entries),
        "label": label and label.value,
        "label_full": label_full and label_full.value,
        "torsion_conditions": list(torsion_conditions(raw)),
        "M": None,
        "psi": [],
    }
    if label is Label.S1:
        M = select_M(raw, N, cfg.eps)
        if D % M or math.gcd(M, 2 * P.x) != 1:
            raise RuntimeError(f"selected M={M} is not admissible for {P}")
        rec["M"] = str(M)
        rec["psi"] = [_psi_record(curve, Q, M) for Q in (P, IntegralPoint(P.x, -P.y))]
    return rec


def process_D(D: int, N: int, cfg: ScanConfig) -> dict:
    """Cache record for one curve; errors are captured, not raised."""
    rec = {
        "schema": SCHEMA,
        "version": __version__,
        "D": str(D),
        "N": str(N),
        "config": cfg.as_dict(),
        "omega": omega(D) if D > 1 else 0,
        "omega_window": omega_window(D, N, cfg.eps) if N >= MIN_WINDOW_N else None,
        "complete_up_to": None,
        "points": [],
        "error": None,
    }
    try:
        curve = TwistCurve(D)
        res = enumerate_all(curve, cfg.search)
        rec["complete_up_to"] = str(res.complete_up_to)
        rec["points"] = [_point_record(curve, P, N, cfg) for P in res.points]
    except Exception as exc:  # recorded per D; the scan carries on
        rec["error"] = f"{type(exc).__name__}: {exc}"
        rec["points"] = []
    return rec


def record_matches(rec: dict, N: int, cfg: ScanConfig) -> bool:
    return (
        rec.get("schema") == SCHEMA
        and rec.get("version") == __version__
        and rec.get("N") == str(N)
        and rec.get("config") == cfg.as_dict()
    )


# Summary ----------------------------------------------------------------------


@dataclass
class ScanSummary:
    N: int
    config: dict
    records: list = field(repr=False)
    total_points: int = 0  # nontrivial integral points, both signs of y
    curves_with_points: int = 0
    ek_tail_fraction: Fraction | None = None
    window_deficit_count: int | None = None
    labels: dict = field(default_factory=dict)
    labels_full: dict = field(default_factory=dict)
    s1_pipeline_runs: int = 0
    torsion_syzygy_points: int = 0
    failed: list = field(default_factory=list)
    C_effective: float | None = None
    C_full: float | None = None
    log_B: float | None = None

    def as_dict(self) -> dict:
        ek = self.ek_tail_fraction
        return {
            "schema": SCHEMA,
            "version": __version__,
            "N": str(self.N),
            "config": self.config,
            "squarefree_count": len(self.records),
            "total_points": str(self.total_points),
            "curves_with_points": self.curves_with_points,
            "ek_tail_fraction": None if ek is None else f"{ek.numerator}/{ek.denominator}",
            "ek_tail_fraction_float": None if ek is None else float(ek),
            "window_deficit_count": self.window_deficit_count,
            "labels": self.labels,
            "labels_full": self.labels_full,
            "s1_pipeline_runs": self.s1_pipeline_runs,
            "torsion_syzygy_points": self.torsion_syzygy_points,
            "failed": self.failed,
            "C_effective": self.C_effective,
            "C_full": self.C_full,
            "log_B": self.log_B,
        }


def summarize(records: list[dict], N: int, cfg: ScanConfig) -> ScanSummary:
    records = sorted(records, key=lambda r: int(r["D"]))
    Ds = [int(r["D"]) for r in records]
    if len(set(Ds)) != len(Ds):
        raise ValueError("duplicate D in records")
    labels, labels_full = Counter(), Counter()
    s = ScanSummary(N, cfg.as_dict(), records)
    for r in records:
        pts = r["points"]
        s.total_points += 2 * len(pts)
        s.curves_with_points += bool(pts)
        if r["error"]:
            s.failed.append(r["D"])
        for p in pts:
            labels[p["label"]] += 1
            labels_full[p["label_full"]] += 1
            s.s1_pipeline_runs += bool(p["psi"])
            s.torsion_syzygy_points += sum(q["torsion"] for q in p["psi"])
    s.labels = {lab.value: labels.get(lab.value, 0) for lab in Label}
    s.labels_full = {lab.value: labels_full.get(lab.value, 0) for lab in Label}
    if N >= MIN_WINDOW_N:
        L = loglog(N)
        tail = sum(abs(r["omega"] - L) >= cfg.eta * L for r in records)
        s.ek_tail_fraction = Fraction(tail, len(records)) if records else Fraction(0)
        s.window_deficit_count = sum(r["omega_window"] < LAMBDA * L for r in records)
        s.C_effective = cfg.C(N)
        s.C_full = cfg.full_C(N)
        s.log_B = log_B(N)
    return s


def aggregate_scan(N: int, cfg: ScanConfig = ScanConfig(), records: dict | None = None, progress=None) -> ScanSummary:
    """Process every squarefree D <= N, reusing ``records`` (D -> record) when they match.

    For N < MIN_WINDOW_N the window-based fields are None.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    records = dict(records or {})
    out = []
    for D in squarefree_sieve(N).values.tolist():
        rec = records.get(D)
        if rec is None or not record_matches(rec, N, cfg):
            rec = process_D(D, N, cfg)
            if progress:
                progress(rec)
        out.append(rec)
    return summarize(out, N, cfg)
