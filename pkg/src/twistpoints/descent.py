"""2-descent bookkeeping for E_D.

A point (x, y) with x = r/W^2 and D0 = gcd(r, D) gives the quadruple
(D1, D2, D3, D4) through
    r/D0 = D1 X^2,  r/D0 + W^2 D4 = D2 Y^2,  r/D0 - W^2 D4 = D3 Z^2,
so that D1 X^2 + D4 W^2 = D2 Y^2 and D1 X^2 - D4 W^2 = D3 Z^2.
D4 = D/D0 > 0 and D1 D2 D3 = D0 (DIRECT) or 4 D0 (FOUR_D, odd D only).
Entries D1, D2, D3 carry signs; positive representatives are reached by
adding a 2-torsion point.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator

from .arith import (
    factorize,
    in_window,
    is_padic_square,
    is_square,
    is_squarefree,
    jacobi,
    odd_part,
    omega,
    prime_window,
    square_class,
    squarefree_part,
    valuation,
)
from .curve import INFINITY, TwistCurve, add, as_point, on_curve, torsion

# Erdos-Kac tail width: positive root of eta^2/2 = (1 - eta) log(4/3), which
# balances the tail exponent against the window-prime count exponent.
ETA = math.sqrt(4 * (math.log(2) - math.log(3) + 1) * math.log(2) + (math.log(3) - 2) * math.log(3)) - 2 * math.log(2) + math.log(3)
LAMBDA = 1 - ETA

# Primes at or below this bound are always checked explicitly.
SMALL_PRIME_CHECK = 17


def log_B(N: int) -> float:
    """log of B = (log N)^528; B itself overflows a float. Reported only."""
    return 528 * math.log(math.log(N))


class Variant(enum.Enum):
    DIRECT = "DIRECT"
    FOUR_D = "FOUR_D"


class Label(enum.Enum):
    S1 = "S1"
    S2 = "S2"
    W1 = "W1"
    W1c = "W1c"
    W2 = "W2"


class NoWindowPrime(ValueError):
    pass


@dataclass(frozen=True, order=True)
class SelmerQuadruple:
    D1: int
    D2: int
    D3: int
    D4: int

    def __post_init__(self):
        for v in self.entries:
            if not isinstance(v, int) or not is_squarefree(v):
                raise ValueError(f"quadruple entries must be squarefree integers: {self.entries}")
        if self.D4 < 0 or self.D1 * self.D2 * self.D3 < 0:
            raise ValueError(f"need D4 > 0 and D1*D2*D3 > 0: {self.entries}")

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.D1, self.D2, self.D3, self.D4)

    @property
    def product(self) -> int:
        return self.D1 * self.D2 * self.D3 * self.D4

    @property
    def variant(self) -> Variant:
        return Variant.FOUR_D if self.D2 % 2 == 0 and self.D3 % 2 == 0 else Variant.DIRECT

    @property
    def D(self) -> int:
        p = self.product
        return p // 4 if self.variant is Variant.FOUR_D else p

    @property
    def D0(self) -> int:
        return self.D // self.D4

    @property
    def is_positive(self) -> bool:
        return min(self.entries) > 0

    @property
    def odd_parts(self) -> tuple[int, int, int, int]:
        return tuple(odd_part(v) for v in self.entries)

    def theta(self) -> tuple[int, int, int]:
        D1, D2, D3, _ = self.entries
        return (squarefree_part(D1 * D2), squarefree_part(D2 * D3), squarefree_part(D1 * D3))

    def __str__(self):
        return f"({self.D1},{self.D2},{self.D3},{self.D4})"


@dataclass(frozen=True)
class DescentWitness:
    X: int
    Y: int
    Z: int
    W: int

    def satisfies(self, q: SelmerQuadruple) -> bool:
        D1, D2, D3, D4 = q.entries
        X2, W2 = self.X**2, self.W**2
        return D1 * X2 + D4 * W2 == D2 * self.Y**2 and D1 * X2 - D4 * W2 == D3 * self.Z**2


def theta(curve: TwistCurve, p) -> tuple[int, int, int]:
    """Square classes of (x - D, x, x + D) at a non-2-torsion point."""
    p = as_point(p)
    if p is INFINITY or p.y == 0:
        raise ValueError("theta is only defined here for non-torsion points")
    D = curve.D
    return tuple(square_class(p.x + s) for s in (-D, 0, D))


def torsion_thetas(D: int) -> dict:
    """theta image of each 2-torsion point, keyed by the point (INFINITY or x)."""
    return {
        INFINITY: (1, 1, 1),
        0: (-D, -1, D),
        D: (2, D, squarefree_part(2 * D)),
        -D: (squarefree_part(-2 * D), -D, 2),
    }


def point_to_quadruple(curve: TwistCurve, p) -> tuple[SelmerQuadruple, DescentWitness]:
    p = as_point(p)
    if p is INFINITY or p.y == 0:
        raise ValueError("point_to_quadruple needs y != 0")
    if not on_curve(curve, p):
        raise ValueError(f"{p} is not on E_{curve.D}")
    D = curve.D
    r, s = p.x.numerator, p.x.denominator
    ok, W = is_square(s)
    if not ok:
        raise RuntimeError(f"denominator {s} of x is not a square")
    D0 = math.gcd(r, D)
    rp, D4 = r // D0, D // D0
    parts = []
    for v in (rp, rp + s * D4, rp - s * D4):
        Di = squarefree_part(v)
        ok, root = is_square(v // Di)
        if not ok:
            raise RuntimeError(f"{v}/{Di} is not a square")
        parts.append((Di, root))
    (D1, X), (D2, Y), (D3, Z) = parts
    q = SelmerQuadruple(D1, D2, D3, D4)
    w = DescentWitness(X, Y, Z, W)
    if q.D != D or not w.satisfies(q):
        raise RuntimeError(f"descent construction failed for {p}: {q}, {w}")
    return q, w


def witness_x(q: SelmerQuadruple, w: DescentWitness) -> Fraction:
    """x-coordinate of the point encoded by a witness."""
    return Fraction(q.D0 * q.D1 * w.X**2, w.W**2)


def torsion_translates(curve: TwistCurve, p) -> list:
    return [add(curve, p, t) for t in torsion(curve)]


def positive_representative(curve: TwistCurve, p) -> tuple:
    """(translate, quadruple, witness) with all entries positive, preferring DIRECT."""
    best = None
    for t in torsion_translates(curve, p):
        q, w = point_to_quadruple(curve, t)
        if q.is_positive:
            if q.variant is Variant.DIRECT:
                return t, q, w
            best = best or (t, q, w)
    if best is None:
        raise RuntimeError(f"no torsion translate of {p} has a positive quadruple")
    return best


def torsion_quadruples(D: int) -> list[SelmerQuadruple]:
    """The four quadruples carrying the 2-torsion classes (D > 1 assumed squarefree)."""
    if D % 2:
        return [
            SelmerQuadruple(1, 1, 1, D),
            SelmerQuadruple(-D, 1, -1, 1),
            SelmerQuadruple(1, 2, 2 * D, 1),
            SelmerQuadruple(-1, 2 * D, -2, 1),
        ]
    return [
        SelmerQuadruple(1, 1, 1, D),
        SelmerQuadruple(-D, 1, -1, 1),
        SelmerQuadruple(1, 2, D // 2, 1),
        SelmerQuadruple(-1, D // 2, -2, 1),
    ]


def is_torsion_class(q: SelmerQuadruple) -> bool:
    return q.theta() in torsion_thetas(q.D).values()


def torsion_conditions(q: SelmerQuadruple) -> tuple[bool, bool, bool]:
    """Square-class conditions D1D2 ~ 2, D2D3 ~ -1, D1D3 ~ 2 that a torsion
    syzygy point with H = a Dt, 0, -a Dt would force."""
    D1, D2, D3, _ = q.entries
    return (
        squarefree_part(D1 * D2) == 2,
        squarefree_part(D2 * D3) == -1,
        squarefree_part(D1 * D3) == 2,
    )


# Local solvability ---------------------------------------------------------

_GOOD, _BAD, _UNKNOWN = 1, -1, 0


def _real_solvable(D1, D2, D3, D4) -> bool:
    # t = X^2 / (X^2 + W^2) in [0, 1]; both forms are linear in t.
    u1 = lambda t: D1 * t + D4 * (1 - t)  # noqa: E731
    u2 = lambda t: D1 * t - D4 * (1 - t)  # noqa: E731
    pts = {Fraction(0), Fraction(1)}
    for a, b in ((D1 - D4, D4), (D1 + D4, -D4)):
        if a:
            r = Fraction(-b, a)
            if 0 <= r <= 1:
                pts.add(r)
    ordered = sorted(pts)
    pts.update((x + y) / 2 for x, y in zip(ordered, ordered[1:]))
    return any(D2 * u1(t) >= 0 and D3 * u2(t) >= 0 for t in pts)


def _status(n: int, p: int, j: int) -> int:
    """Square status of every value in a class known only modulo p^j."""
    if n % p**j == 0:
        return _UNKNOWN
    v = valuation(n, p)
    if v % 2:
        return _BAD
    unit = n // p**v
    if p == 2:
        if j - v < 3:
            return _UNKNOWN
        return _GOOD if unit % 8 == 1 else _BAD
    return _GOOD if jacobi(unit % p, p) == 1 else _BAD


def padic_solvable(D1: int, D2: int, D3: int, D4: int, p: int, max_depth: int = 64) -> bool:
    """Nonzero Q_p-solution of D1X^2 + D4W^2 = D2Y^2, D1X^2 - D4W^2 = D3Z^2.

    Searches P^1(Z_p) for (X : W) making D2*u1 and D3*u2 squares, refining
    residue classes until each is decided. Points where u1 or u2 vanishes are
    handled in closed form first, so refinement always terminates.
    """
    if is_padic_square(-D1 * D4, p) and is_padic_square(-2 * D3 * D4, p):
        return True
    if is_padic_square(D1 * D4, p) and is_padic_square(2 * D2 * D4, p):
        return True
    # chart 0: (X, 1), X in Z_p;  chart 1: (1, W), W in pZ_p
    stack = [(0, r, 1) for r in range(p)] + [(1, 0, 1)]
    while stack:
        chart, r, j = stack.pop()
        if j > max_depth:
            raise RuntimeError(f"p-adic search at p={p} exceeded depth {max_depth}")
        X, W = (r, 1) if chart == 0 else (1, r)
        a, b = D1 * X * X, D4 * W * W
        s1, s2 = _status(D2 * (a + b), p, j), _status(D3 * (a - b), p, j)
        if s1 == _GOOD and s2 == _GOOD:
            return True
        if _BAD in (s1, s2):
            continue
        step = p**j
        stack.extend((chart, r + t * step, j + 1) for t in range(p))
    return False


def _primes(n: int) -> list[int]:
    return list(factorize(abs(n)).primes) if abs(n) > 1 else []


def locally_solvable(q: SelmerQuadruple | tuple) -> bool:
    """Everywhere local solvability of the descent system of q.

    Primes not dividing 2*D1*D2*D3*D4 give a smooth genus-one reduction,
    which has points by the Hasse-Weil bound; those above SMALL_PRIME_CHECK
    are skipped, the rest are searched anyway.
    """
    D1, D2, D3, D4 = q.entries if isinstance(q, SelmerQuadruple) else q
    if not _real_solvable(D1, D2, D3, D4):
        return False
    primes = set(_primes(2 * D1 * D2 * D3 * D4))
    primes.update(p for p in (2, 3, 5, 7, 11, 13, 17) if p <= SMALL_PRIME_CHECK)
    return all(padic_solvable(D1, D2, D3, D4, p) for p in sorted(primes))


def _assignments(primes, slots) -> Iterator[tuple[int, ...]]:
    for choice in product(range(slots), repeat=len(primes)):
        parts = [1] * slots
        for p, k in zip(primes, choice):
            parts[k] *= p
        yield tuple(parts)


def candidate_quadruples(D: int, positive_only: bool = False) -> Iterator[SelmerQuadruple]:
    """All well-formed quadruples for D (both variants, all admissible signs)."""
    if D < 1 or not is_squarefree(D):
        raise ValueError(f"D must be positive squarefree, got {D}")
    primes = factorize(D).primes if D > 1 else ()
    signs = [(1, 1, 1)] if positive_only else [(1, 1, 1), (-1, -1, 1), (-1, 1, -1), (1, -1, -1)]
    for a, b, c, d in _assignments(primes, 4):
        for s1, s2, s3 in signs:
            yield SelmerQuadruple(s1 * a, s2 * b, s3 * c, d)
            if D % 2:
                yield SelmerQuadruple(s1 * a, s2 * 2 * b, s3 * 2 * c, d)


def selmer_enumerate(D: int, limit: int = 10**6, positive_only: bool = False) -> set[SelmerQuadruple]:
    """Locally solvable quadruples for D.

    The full (signed) set models Sel_2(E_D) and has 4 * 2^s elements; with
    ``positive_only`` only positive entries are kept.
    """
    from .arith import ResourceLimitError

    if D > limit:
        raise ResourceLimitError(f"D={D} exceeds the enumeration limit {limit}")
    return {q for q in candidate_quadruples(D, positive_only) if locally_solvable(q)}


def selmer_positive_direct(D: int) -> set[SelmerQuadruple]:
    """Locally solvable quadruples with positive entries and product D."""
    return {q for q in selmer_enumerate(D, positive_only=True) if q.product == D}


# Jacobi-symbol indicator sums ----------------------------------------------

_KEYS = [(i, j) for i in range(1, 5) for j in range(0, 5) if j != i]


@dataclass(frozen=True)
class SixteenTuple:
    entries: tuple  # ((i, j), D_ij) pairs in _KEYS order

    def __post_init__(self):
        if [k for k, _ in self.entries] != _KEYS:
            raise ValueError("sixteen-tuple keys malformed")
        if any(v < 1 or v % 2 == 0 for _, v in self.entries):
            raise ValueError("sixteen-tuple entries must be odd positive")

    @classmethod
    def from_dict(cls, d: dict) -> "SixteenTuple":
        return cls(tuple((k, d.get(k, 1)) for k in _KEYS))

    def __getitem__(self, key):
        return dict(self.entries)[key]

    def row_products(self) -> tuple[int, int, int, int]:
        m = dict(self.entries)
        return tuple(math.prod(m[(i, j)] for j in range(5) if j != i) for i in range(1, 5))


def _jac(a: int, n: int) -> int:
    return 1 if n == 1 else jacobi(a, n)


_BETA_EVEN = {
    1: ((2, 3), (3, 2), (4, 2), (4, 3), (2, 1), (3, 1)),
    2: ((1, 3), (1, 4), (4, 1), (4, 3), (2, 4), (2, 1)),
    3: ((1, 2), (1, 4), (4, 1), (4, 2), (3, 4), (3, 1)),
    4: ((1, 2), (1, 3), (2, 3), (3, 2), (2, 4), (3, 4)),
}
_ALPHA = ((1, 2), (1, 4), (2, 3), (2, 1))
_BETA = ((2, 4), (2, 1), (3, 4), (3, 1))


def g_weight(t: SixteenTuple, beta_keys=_BETA) -> Fraction:
    m = dict(t.entries)
    alpha = math.prod(m[k] for k in _ALPHA)
    beta = math.prod(m[k] for k in beta_keys)
    sign = _jac(-1, alpha) * _jac(2, beta)
    if sign == 0:
        return Fraction(0)
    total_omega = sum(omega(v) for v in m.values() if v > 1)
    for (i, j), Dij in m.items():
        if j == 0 or Dij == 1:
            continue
        for k in range(1, 5):
            if k in (i, j):
                continue
            for l in range(5):
                if l != k:
                    sign *= _jac(m[(k, l)], Dij)
                    if sign == 0:
                        return Fraction(0)
    return Fraction(sign, 4**total_omega)


def sixteen_tuples(D1: int, D2: int, D3: int, D4: int) -> Iterator[SixteenTuple]:
    """All 16-tuples with prod_{j != i} D_ij = D_i."""
    rows = []
    for i, Di in enumerate((D1, D2, D3, D4), start=1):
        if Di < 1 or Di % 2 == 0 or not is_squarefree(Di):
            raise ValueError(f"D_{i}={Di} must be odd squarefree positive")
        cols = [j for j in range(5) if j != i]
        primes = factorize(Di).primes if Di > 1 else ()
        rows.append([dict(zip(((i, j) for j in cols), parts)) for parts in _assignments(primes, 4)])
    for combo in product(*rows):
        d = {}
        for part in combo:
            d.update(part)
        yield SixteenTuple.from_dict(d)


def _check_budget(D1, D2, D3, D4, budget):
    from .arith import ResourceLimitError

    count = 4 ** sum(omega(v) for v in (D1, D2, D3, D4) if v > 1)
    if count > budget:
        raise ResourceLimitError(f"{count} sixteen-tuples exceed budget {budget}")


def big_G(D1: int, D2: int, D3: int, D4: int, budget: int = 4**10) -> Fraction:
    _check_budget(D1, D2, D3, D4, budget)
    return sum((g_weight(t) for t in sixteen_tuples(D1, D2, D3, D4)), Fraction(0))


def big_G_even(D1: int, D2: int, D3: int, D4: int, s: int, budget: int = 4**10) -> Fraction:
    if s not in _BETA_EVEN:
        raise ValueError(f"s must be 1..4, got {s}")
    _check_budget(D1, D2, D3, D4, budget)
    keys = _BETA_EVEN[s]
    return sum((g_weight(t, keys) for t in sixteen_tuples(D1, D2, D3, D4)), Fraction(0))


# Classification -------------------------------------------------------------


def C_constant(N: int, kappa: float = 1.0) -> float:
    return math.exp(kappa * math.log(math.log(N)) ** 2)


def toy_kappa(N: int) -> float:
    """kappa making C = N^(1/8), so the classes are populated at desk scale."""
    L = math.log(math.log(N))
    return (math.log(N) / 8) / (L * L)


def _has_window_prime(n: int, window) -> bool:
    return any(in_window(p, window) for p in _primes(n))


def classify_quadruple(q: SelmerQuadruple, D: int, N: int, eps: float, C: float) -> Label:
    """Deterministic case split; precedence S2 > W1 > W2 > W1c > S1."""
    if q.D != D:
        raise ValueError(f"{q} does not belong to D={D}")
    if is_torsion_class(q):
        return Label.S2
    odds = q.odd_parts
    if any(1 < v < C for v in odds):
        return Label.W1
    if any(v == 1 for v in odds):
        return Label.W2
    window = prime_window(N, eps)
    if not all(_has_window_prime(v, window) for v in q.entries):
        return Label.W1c
    return Label.S1


def select_M(q: SelmerQuadruple, N: int, eps: float) -> int:
    """Smallest prime of D4 strictly inside the window."""
    window = prime_window(N, eps)
    for p in _primes(q.D4):
        if in_window(p, window):
            return p
    raise NoWindowPrime(f"D4={q.D4} has no prime in {window}")
