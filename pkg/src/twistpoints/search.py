"""Two independent enumerators of integral points on E_D, cross-checked.

``brute_force_points`` scans x directly, discarding x whose cubic is a
non-residue modulo a few auxiliary moduli before an exact isqrt.
``descent_search`` runs over the descent quadruples instead and reconstructs
x = D0 D1 X^2. An integral x has D0 |D1| >= 1, so descent is complete for
x <= X_bound^2.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import factorize
from .curve import INFINITY, IntegralPoint, TwistCurve, add, on_curve, torsion

# Moduli for the residue filter; products of small prime powers, each < 5e4.
FILTER_MODULI = (2880, 17017, 12673, 47027)
_FLOAT_EXACT = 2**52


class Method(enum.Enum):
    BRUTE = "brute"
    DESCENT = "descent"
    BOTH = "both"


class InconsistentEnumeration(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    x_bound: int = 10**6
    X_bound: int = 10**3
    method: Method = Method.BOTH

    def __post_init__(self):
        if self.x_bound < 1 or self.X_bound < 1:
            raise ValueError("search bounds must be >= 1")
        if not isinstance(self.method, Method):
            object.__setattr__(self, "method", Method(self.method))


@dataclass(frozen=True)
class EnumerationResult:
    points: tuple[IntegralPoint, ...]  # y > 0, ascending x
    brute: tuple[IntegralPoint, ...] | None
    descent: tuple[IntegralPoint, ...] | None
    complete_up_to: int  # every point with x <= this bound is listed
    config: SearchConfig = field(repr=False)

    def signed_count(self) -> int:
        return 2 * len(self.points)


@lru_cache(maxsize=None)
def _square_table(m: int) -> np.ndarray:
    r = np.arange(m, dtype=np.int64)
    sq = np.zeros(m, dtype=bool)
    sq[(r * r) % m] = True
    return sq


def _rhs_table(m: int, D: int) -> np.ndarray:
    """Boolean table over x mod m: is x^3 - D^2 x a square mod m."""
    r = np.arange(m, dtype=np.int64)
    v = (r * r % m * r - (D * D % m) * r) % m
    return _square_table(m)[v]


@lru_cache(maxsize=2)
def _positive_residues(x_bound: int) -> tuple[np.ndarray, ...]:
    xs = np.arange(1, x_bound + 1, dtype=np.int64)
    return tuple((xs % m).astype(np.int32) for m in FILTER_MODULI)


def _exact_hits(D: int, candidates) -> list[IntegralPoint]:
    out = []
    for x in candidates:
        v = x * x * x - D * D * x
        if v > 0:
            y = math.isqrt(v)
            if y * y == v:
                out.append(IntegralPoint(x, y))
    return out


def _filtered(D: int, residues, offset: int) -> list[int]:
    """x = offset + index surviving every residue filter."""
    tab = _rhs_table(FILTER_MODULI[0], D)
    idx = np.flatnonzero(tab[residues[0]])
    for m, res in zip(FILTER_MODULI[1:], residues[1:]):
        if not len(idx):
            break
        idx = idx[_rhs_table(m, D)[res[idx]]]
    return (idx + offset).tolist()


def brute_force_points(curve: TwistCurve, cfg: SearchConfig = SearchConfig()) -> set[IntegralPoint]:
    """All (x, y), y > 0, with x in [-D, 0] or [D, x_bound]."""
    D = curve.D
    neg = np.arange(-D, 1, dtype=np.int64)
    cands = _filtered(D, tuple((neg % m).astype(np.int32) for m in FILTER_MODULI), -D)
    if cfg.x_bound >= D:
        residues = _positive_residues(cfg.x_bound)
        cands += _filtered(D, tuple(r[D - 1 :] for r in residues), D)
    return set(_exact_hits(D, cands))


def _descent_quadruples(D: int):
    """(D1, D2, D3, D4, yfactor) for the sign patterns integral points can have.

    x > D forces all entries positive; -D < x < 0 forces D1, D3 < 0.
    """
    primes = factorize(D).primes if D > 1 else ()
    out = []
    for choice in np.ndindex(*(4,) * len(primes)):
        parts = [1, 1, 1, 1]
        for p, k in zip(primes, choice):
            parts[k] *= p
        a, b, c, d = parts
        variants = [(1, 1)] + ([(2, 2)] if D % 2 else [])
        for mul, yf in variants:
            for s in (1, -1):
                out.append((s * a, b * mul, s * c * mul, d, yf))
    return out


def descent_search(curve: TwistCurve, cfg: SearchConfig = SearchConfig()) -> set[IntegralPoint]:
    """Points reconstructed from D1 X^2 + D4 = D2 Y^2, D1 X^2 - D4 = D3 Z^2."""
    D = curve.D
    quads = np.array(_descent_quadruples(D), dtype=np.int64)
    X = np.arange(1, cfg.X_bound + 1, dtype=np.int64)
    if D * cfg.X_bound**2 + D >= _FLOAT_EXACT:
        raise ValueError("descent bounds too large for exact float square detection")
    D1, D2, D3, D4, yf = (quads[:, i : i + 1] for i in range(5))
    lhs = D1 * (X * X)[None, :]
    v1, v2 = lhs + D4, lhs - D4
    ok = (v1 % D2 == 0) & (v2 % D3 == 0)
    w1 = np.where(ok, v1 // D2, -1)
    w2 = np.where(ok, v2 // D3, -1)
    ok &= (w1 >= 0) & (w2 >= 0)
    r1 = np.rint(np.sqrt(np.maximum(w1, 0))).astype(np.int64)
    r2 = np.rint(np.sqrt(np.maximum(w2, 0))).astype(np.int64)
    ok &= (r1 * r1 == w1) & (r2 * r2 == w2)
    found = set()
    for qi, xi in zip(*np.nonzero(ok)):
        d1, d2, d3, d4, f = (int(v) for v in quads[qi])
        Xv, Y, Z = int(X[xi]), int(r1[qi, xi]), int(r2[qi, xi])
        D0 = D // d4
        x = D0 * d1 * Xv * Xv
        y = f * D0 * D0 * Xv * Y * Z
        if y == 0:
            continue
        P = IntegralPoint(x, y)
        if not on_curve(curve, P):
            raise RuntimeError(f"descent reconstruction {P} is off E_{D}")
        found.add(P)
    # Close under torsion translation, keeping integral non-torsion images.
    for P in list(found):
        for T in torsion(curve)[1:]:
            Q = add(curve, P, T)
            if Q is not INFINITY and Q.is_integral and Q.y != 0:
                found.add(IntegralPoint(int(Q.x), abs(int(Q.y))))
    return found


def enumerate_all(curve: TwistCurve, cfg: SearchConfig = SearchConfig()) -> EnumerationResult:
    brute = descent = None
    if cfg.method in (Method.BRUTE, Method.BOTH):
        brute = brute_force_points(curve, cfg)
    if cfg.method in (Method.DESCENT, Method.BOTH):
        descent = descent_search(curve, cfg)
    if brute is not None and descent is not None:
        horizon = min(cfg.x_bound, cfg.X_bound**2)
        b = {p for p in brute if p.x <= horizon}
        d = {p for p in descent if p.x <= horizon}
        if b != d:
            raise InconsistentEnumeration(
                f"D={curve.D}: brute-only {sorted(b - d)}, descent-only {sorted(d - b)}"
            )
        points = brute | descent
        complete = max(cfg.x_bound, cfg.X_bound**2)
    elif brute is not None:
        points, complete = brute, cfg.x_bound
    else:
        points, complete = descent, cfg.X_bound**2
    for p in points:
        if p.y <= 0 or not on_curve(curve, p):
            raise RuntimeError(f"invalid point {p} for D={curve.D}")

    def srt(s):
        return None if s is None else tuple(sorted(s))

    return EnumerationResult(srt(points), srt(brute), srt(descent), complete, cfg)
