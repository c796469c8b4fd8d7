"""Integer-matrix binary quartic forms.

A form is stored by its integer-matrix coordinates (a0, ..., a4), meaning
    a0 X^4 + 4 a1 X^3 Y + 6 a2 X^2 Y^2 + 4 a3 X Y^3 + a4 Y^4.
Entries may be Fractions; ``act`` and ``scale`` deliberately leave the
integral world and ``is_integer_matrix`` / ``is_integral`` say where you are.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .curve import IntegralPoint, OffCurveError, TwistCurve, on_curve

BINOMIAL = (1, 4, 6, 4, 1)


def _norm(v):
    v = Fraction(v)
    return v.numerator if v.denominator == 1 else v


@dataclass(frozen=True)
class Quartic:
    a0: int | Fraction
    a1: int | Fraction
    a2: int | Fraction
    a3: int | Fraction
    a4: int | Fraction

    def __post_init__(self):
        for name in ("a0", "a1", "a2", "a3", "a4"):
            object.__setattr__(self, name, _norm(getattr(self, name)))

    @classmethod
    def from_coefficients(cls, coeffs: Sequence) -> "Quartic":
        """Build from plain polynomial coefficients (X^4, X^3Y, ..., Y^4)."""
        if len(coeffs) != 5:
            raise ValueError("a quartic has five coefficients")
        return cls(*(Fraction(c) / b for c, b in zip(coeffs, BINOMIAL)))

    @property
    def a(self) -> tuple:
        return (self.a0, self.a1, self.a2, self.a3, self.a4)

    @property
    def coefficients(self) -> tuple:
        return tuple(_norm(b * x) for b, x in zip(BINOMIAL, self.a))

    @property
    def is_integer_matrix(self) -> bool:
        return all(Fraction(x).denominator == 1 for x in self.a)

    @property
    def is_integral(self) -> bool:
        return all(Fraction(c).denominator == 1 for c in self.coefficients)

    def __call__(self, x, y):
        return _norm(sum(c * x ** (4 - i) * y**i for i, c in enumerate(self.coefficients)))

    def __str__(self):
        mons = ("X^4", "X^3*Y", "X^2*Y^2", "X*Y^3", "Y^4")
        terms = []
        for c, m in zip(self.coefficients, mons):
            if c == 0:
                continue
            coef = "" if c == 1 else "-" if c == -1 else f"{c}*"
            terms.append(f"{coef}{m}")
        return " + ".join(terms).replace("+ -", "- ") or "0"


class QuarticInvariants(NamedTuple):
    I: int | Fraction
    J: int | Fraction
    disc: int | Fraction


class Seminvariants(NamedTuple):
    a: int | Fraction
    H: int | Fraction
    R: int | Fraction


def invariants(f: Quartic) -> QuarticInvariants:
    a0, a1, a2, a3, a4 = (Fraction(x) for x in f.a)
    I = a0 * a4 - 4 * a1 * a3 + 3 * a2 * a2
    J = a0 * a2 * a4 - a0 * a3 * a3 - a1 * a1 * a4 + 2 * a1 * a2 * a3 - a2**3
    return QuarticInvariants(_norm(I), _norm(J), _norm(I**3 - 27 * J * J))


def seminvariants(f: Quartic) -> Seminvariants:
    a0, a1, a2, a3, _ = (Fraction(x) for x in f.a)
    H = a1 * a1 - a0 * a2
    R = 2 * a1**3 + a0 * a0 * a3 - 3 * a0 * a1 * a2
    return Seminvariants(_norm(a0), _norm(H), _norm(R))


def syzygy_sides(f: Quartic) -> tuple[Fraction, Fraction]:
    I, J, _ = invariants(f)
    a, H, R = seminvariants(f)
    I, J, a, H, R = map(Fraction, (I, J, a, H, R))
    return H**3 - I / 4 * a * a * H - J / 4 * a**3, (R / 2) ** 2


def syzygy_check(f: Quartic) -> bool:
    lhs, rhs = syzygy_sides(f)
    return lhs == rhs


def mordell_quartic(curve: TwistCurve, P: IntegralPoint) -> Quartic:
    """The form f_P = X^4 - 6cX^2Y^2 + 8dXY^3 + (4D^2 - 3c^2)Y^4 of P = (c, d)."""
    c, d = P.x, P.y
    if not on_curve(curve, P):
        raise OffCurveError(f"{P} is not on E_{curve.D}")
    return Quartic(1, 0, -c, 2 * d, -4 * curve.A - 3 * c * c)


@dataclass(frozen=True)
class RationalTransform:
    """2x2 matrix acting on forms by f -> f((x, y) . gamma) / det^2."""

    m00: int | Fraction
    m01: int | Fraction
    m10: int | Fraction
    m11: int | Fraction

    def __post_init__(self):
        for name in ("m00", "m01", "m10", "m11"):
            object.__setattr__(self, name, _norm(getattr(self, name)))
        if self.det == 0:
            raise ValueError("singular transform")

    @property
    def det(self):
        return _norm(Fraction(self.m00) * self.m11 - Fraction(self.m01) * self.m10)

    def __matmul__(self, other: "RationalTransform") -> "RationalTransform":
        a, b, c, d = (Fraction(x) for x in (self.m00, self.m01, self.m10, self.m11))
        e, f, g, h = (Fraction(x) for x in (other.m00, other.m01, other.m10, other.m11))
        return RationalTransform(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    @property
    def is_unimodular(self) -> bool:
        return self.det == 1 and all(
            Fraction(x).denominator == 1 for x in (self.m00, self.m01, self.m10, self.m11)
        )

    def as_tuple(self) -> tuple:
        return (self.m00, self.m01, self.m10, self.m11)


IDENTITY = RationalTransform(1, 0, 0, 1)


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        if x:
            for j, y in enumerate(q):
                out[i + j] += x * y
    return out


def _poly_pow(p, n):
    out = [Fraction(1)]
    for _ in range(n):
        out = _poly_mul(out, p)
    return out


def substitute(coeffs: Sequence, alpha, beta, gamma, delta) -> list[Fraction]:
    """Plain coefficients of f(alpha X + beta Y, gamma X + delta Y).

    ``coeffs`` lists a binary form of degree n from X^n down to Y^n.
    """
    n = len(coeffs) - 1
    lin1 = [Fraction(alpha), Fraction(beta)]
    lin2 = [Fraction(gamma), Fraction(delta)]
    out = [Fraction(0)] * (n + 1)
    for i, c in enumerate(coeffs):
        if c:
            term = _poly_mul(_poly_pow(lin1, n - i), _poly_pow(lin2, i))
            for k, t in enumerate(term):
                out[k] += c * t
    return out


def act(gamma: RationalTransform, f: Quartic) -> Quartic:
    # (x, y) . gamma = (m00 x + m10 y, m01 x + m11 y)
    det = Fraction(gamma.det)
    new = substitute(f.coefficients, gamma.m00, gamma.m10, gamma.m01, gamma.m11)
    return Quartic.from_coefficients([c / (det * det) for c in new])


def scale(lam, f: Quartic) -> Quartic:
    lam = Fraction(lam)
    if lam == 0:
        raise ValueError("scale factor must be nonzero")
    return Quartic(*(lam * x for x in f.a))


def translate(f: Quartic, t) -> Quartic:
    """f(X + tY, Y)."""
    return act(RationalTransform(1, 0, t, 1), f)


def hessian(f: Quartic) -> Quartic:
    """Quartic covariant h with h(1, 0) = H(f); covariant of weight 2.

    For unimodular gamma with first row (p, q), H(gamma.f) = h(p, q).
    """
    c = [Fraction(x) for x in f.coefficients]
    # second partials as binary quadratics
    fxx = [12 * c[0], 6 * c[1], 2 * c[2]]
    fxy = [3 * c[1], 4 * c[2], 3 * c[3]]
    fyy = [2 * c[2], 6 * c[3], 12 * c[4]]
    num = [x - y for x, y in zip(_poly_mul(fxy, fxy), _poly_mul(fxx, fyy))]
    return Quartic.from_coefficients([x / 144 for x in num])


def evaluate_coeffs(coeffs: Sequence, x, y):
    n = len(coeffs) - 1
    return sum(Fraction(c) * Fraction(x) ** (n - i) * Fraction(y) ** i for i, c in enumerate(coeffs))

