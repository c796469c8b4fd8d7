"""The twists E_D : y^2 = x^3 - D^2 x and their rational points."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Union

from .arith import PrimeFactorization, factorize, is_squarefree


class OffCurveError(ValueError):
    pass


@dataclass(frozen=True)
class TwistCurve:
    D: int

    def __post_init__(self):
        if not isinstance(self.D, int) or self.D < 1 or not is_squarefree(self.D):
            raise ValueError(f"D must be a positive squarefree integer, got {self.D!r}")

    @property
    def A(self) -> int:
        return -self.D * self.D

    @property
    def B(self) -> int:
        return 0

    @property
    def discriminant(self) -> int:
        # -16(4A^3 + 27B^2) with A = -D^2
        return 64 * self.D**6

    @cached_property
    def factorization(self) -> PrimeFactorization:
        return factorize(self.D)

    def rhs(self, x):
        return x**3 - self.D**2 * x


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "O"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


@dataclass(frozen=True, order=True)
class IntegralPoint:
    x: int
    y: int

    def as_rational(self) -> "RationalPoint":
        return RationalPoint(Fraction(self.x), Fraction(self.y))

    @property
    def nontrivial(self) -> bool:
        return self.y != 0


@dataclass(frozen=True)
class RationalPoint:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    @property
    def is_integral(self) -> bool:
        return self.x.denominator == 1 and self.y.denominator == 1

    def as_integral(self) -> IntegralPoint:
        if not self.is_integral:
            raise ValueError(f"{self} is not integral")
        return IntegralPoint(int(self.x), int(self.y))

    def __repr__(self):
        return f"({self.x}, {self.y})"


Point = Union[RationalPoint, _Infinity]


def as_point(p) -> Point:
    """Coerce IntegralPoint / tuples into the RationalPoint | INFINITY world."""
    if p is INFINITY or isinstance(p, RationalPoint):
        return p
    if isinstance(p, IntegralPoint):
        return p.as_rational()
    if p is None:
        return INFINITY
    x, y = p
    return RationalPoint(Fraction(x), Fraction(y))


def on_curve(curve: TwistCurve, p) -> bool:
    p = as_point(p)
    if p is INFINITY:
        return True
    return p.y * p.y == curve.rhs(p.x)


def torsion(curve: TwistCurve) -> tuple[Point, ...]:
    D = curve.D
    return (INFINITY, RationalPoint(0, 0), RationalPoint(D, 0), RationalPoint(-D, 0))


def is_torsion(curve: TwistCurve, p) -> bool:
    p = as_point(p)
    return p is INFINITY or p.y == 0


def neg(p) -> Point:
    p = as_point(p)
    return p if p is INFINITY else RationalPoint(p.x, -p.y)


def add(curve: TwistCurve, p, q) -> Point:
    """Chord-tangent addition on E_D, exact over Q."""
    p, q = as_point(p), as_point(q)
    for pt in (p, q):
        if not on_curve(curve, pt):
            raise OffCurveError(f"{pt} is not on E_{curve.D}")
    if p is INFINITY:
        return q
    if q is INFINITY:
        return p
    if p.x == q.x:
        if p.y == -q.y:
            # covers P + (-P) and doubling a 2-torsion point
            return INFINITY
        lam = (3 * p.x * p.x + curve.A) / (2 * p.y)
    else:
        lam = (q.y - p.y) / (q.x - p.x)
    x3 = lam * lam - p.x - q.x
    y3 = lam * (p.x - x3) - p.y
    return RationalPoint(x3, y3)


def multiply(curve: TwistCurve, n: int, p) -> Point:
    p = as_point(p)
    if n < 0:
        return multiply(curve, -n, neg(p))
    acc: Point = INFINITY
    while n:
        if n & 1:
            acc = add(curve, acc, p)
        p = add(curve, p, p)
        n >>= 1
    return acc
