"""Discriminant reduction, SL2(Z) reduction of quartics, and the syzygy point.

For an integral point P = (c, d) on E_D and a divisor M of D, ``psi_reduce``
produces an integer-matrix quartic F with F(1, 0) = M and I(F) = 4 Dt^2,
J(F) = 0, where Dt = D / M. ``cremona_reduce`` moves such a form into the
range where |a| <= 8/3 Dt and |H| <= 4/3 Dt^2, and ``syzygy_point`` reads off
the integral point (H, R/2) on E_{|a Dt|}.

Reduction works through a covariant. For J = 0 the resolvent roots are
phi in {-Dt, 0, Dt}, and for one of them h - phi f is a constant times the
square of a definite binary quadratic Q. The SL2(Z)-minimal vectors of Q
give the leading coefficients of reduced representatives.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .arith import crt, factorize, is_rational_square, is_square, sqrt_lift
from .curve import IntegralPoint, OffCurveError, TwistCurve, on_curve
from .quartic import (
    Quartic,
    RationalTransform,
    act,
    hessian,
    invariants,
    mordell_quartic,
    seminvariants,
)


class NoSuchM(ValueError):
    """M does not satisfy M | D and gcd(M, 2c) = 1."""


class NotPositiveDiscriminant(ValueError):
    pass


class NonconformingInvariants(ValueError):
    """The quartic does not have J = 0 and I = 4 Dt^2 for a positive integer Dt."""


class Degenerate(ValueError):
    """A factor a*phi + H vanished in the equivalence test."""


@dataclass(frozen=True)
class PsiResult:
    F: Quartic
    M: int
    k: int
    Dtilde: int


@dataclass(frozen=True)
class ReducedRepresentative:
    g: Quartic
    transform: RationalTransform
    a: int
    H: int
    R: int
    Dtilde: int
    case: int  # which of the two admissible ranges holds (1 or 2)


class SyzygyPoint(NamedTuple):
    x: int
    y: int
    n: int

    @property
    def is_torsion(self) -> bool:
        return self.y == 0


class TorsionCases(NamedTuple):
    """Whether H(g) = a Dt, 0, -a Dt is compatible with the point's square classes."""

    plus: bool
    zero: bool
    minus: bool


def _check_M(curve: TwistCurve, P: IntegralPoint, M: int):
    if not isinstance(M, int) or M < 1:
        raise NoSuchM(f"M must be a positive integer, got {M!r}")
    if curve.D % M:
        raise NoSuchM(f"M={M} does not divide D={curve.D}")
    if math.gcd(M, 2 * P.x) != 1:
        raise NoSuchM(f"gcd(M, 2c) != 1 for M={M}, c={P.x}")
    if not on_curve(curve, P):
        raise OffCurveError(f"{P} is not on E_{curve.D}")


def find_k(curve: TwistCurve, P: IntegralPoint, M: int) -> int:
    """k in [0, M^3) making f_P(X + kY, Y) divisible as in the Psi construction."""
    _check_M(curve, P, M)
    if M == 1:
        return 0
    c, d = P.x, P.y
    residues = []
    for p, _ in factorize(M):
        # The root must also satisfy k^3 = d (mod p), i.e. k = d / c (mod p).
        base = d * pow(c, -1, p) % p
        k = sqrt_lift(c, p, 3, base=base)
        if k is None:
            raise RuntimeError(f"c={c} is not a square mod {p}; point/M structure violated")
        residues.append((k, p**3))
    k = crt(residues)
    g = act(RationalTransform(1, 0, k, 1), mordell_quartic(curve, P))
    if not (g.a2 % M == 0 and g.a3 % (M * M) == 0 and g.a4 % M**3 == 0):
        raise RuntimeError(f"k={k} fails the divisibility conditions for M={M}")
    return k


def psi_reduce(curve: TwistCurve, P: IntegralPoint, M: int) -> PsiResult:
    k = find_k(curve, P, M)
    f = mordell_quartic(curve, P)
    # act() divides by det^2 = M^2; one more 1/M gives f_P(MX + kY, Y) / M^3.
    G = act(RationalTransform(M, 0, k, 1), f)
    F = Quartic(*(Fraction(x) / M for x in G.a))
    Dt = curve.D // M
    if not F.is_integer_matrix or F.a0 != M:
        raise RuntimeError(f"Psi image {F} is not an integer-matrix form with F(1,0)=M")
    if invariants(F) != (4 * Dt * Dt, 0, 64 * Dt**6):
        raise RuntimeError(f"Psi image {F} has unexpected invariants {invariants(F)}")
    return PsiResult(F, M, k, Dt)


def conforming_dtilde(f: Quartic) -> int:
    """Dt with I(f) = 4 Dt^2, J(f) = 0, or raise."""
    if not f.is_integer_matrix:
        raise NonconformingInvariants(f"{f} is not an integer-matrix quartic")
    I, J, disc = invariants(f)
    if disc <= 0:
        raise NotPositiveDiscriminant(f"discriminant {disc} is not positive")
    if J != 0 or I % 4:
        raise NonconformingInvariants(f"I={I}, J={J} are not of the form 4Dt^2, 0")
    ok, Dt = is_square(I // 4)
    if not ok:
        raise NonconformingInvariants(f"I/4 = {I // 4} is not a square")
    return Dt


def reduction_case(a, H, Dtilde) -> int:
    """1 or 2 if (a, H) lies in the corresponding reduced range, else 0.

    The resolvent roots for I = 4 Dt^2, J = 0 are -Dt, 0, Dt, ordered so that
    a*phi1 < a*phi2 < a*phi3. The ranges only depend on |a|.
    """
    a, H, Dt = Fraction(a), Fraction(H), Fraction(Dtilde)
    I = 4 * Dt * Dt
    if a == 0:
        # All a*phi coincide; both ranges collapse onto phi2 = 0.
        if H == 0:
            return 1
        return 2 if 0 <= H <= I / 3 else 0
    A = abs(a)
    # phi1 = -sgn(a) Dt, phi2 = 0, phi3 = sgn(a) Dt; a*phi3 = |a| Dt.
    lo1 = max(-A * Dt, A * Dt - 4 * Dt * Dt + I / 3)
    if A <= Fraction(8, 3) * Dt and lo1 <= H <= 0:
        return 1
    if A <= Fraction(4, 3) * Dt and A * Dt <= H <= I / 3:
        return 2
    return 0


def in_reduced_range(a, H, Dtilde) -> bool:
    return reduction_case(a, H, Dtilde) != 0


def in_coarse_box(a, H, Dtilde) -> bool:
    """The weaker consequence |a| <= 8/3 Dt and |H| <= 4/3 Dt^2."""
    return 3 * abs(a) <= 8 * Dtilde and 3 * abs(H) <= 4 * Dtilde * Dtilde


def _poly_square(q):
    a, b, c = q
    return [a * a, 2 * a * b, b * b + 2 * a * c, 2 * b * c, c * c]


def covariant_quadratic(f: Quartic, Dtilde: int) -> tuple[Fraction, Fraction, Fraction]:
    """Positive definite Q (as A x^2 + B xy + C y^2) with h - phi f = kappa Q^2.

    phi runs over the resolvent roots 0, Dt, -Dt; the first one giving a
    definite square root is used. That choice is SL2(Z)-covariant.
    """
    h = hessian(f).coefficients
    fc = f.coefficients
    for phi in (0, Dtilde, -Dtilde):
        for sign in (1, -1):
            T = [Fraction(sign) * (x - phi * y) for x, y in zip(h, fc)]
            t0 = T[0]
            if t0 <= 0:
                continue
            A, B = t0, T[1] / 2
            C = (T[2] - B * B / t0) / 2
            if [t0 * x for x in T] != _poly_square((A, B, C)):
                continue
            if B * B - 4 * A * C < 0:
                return A, B, C
    raise RuntimeError(f"no definite covariant square root for {f}")


def _gauss_reduce(A, B, C):
    """Reduce a positive definite form; returns (A, B, C, e1, e2) with the
    reduced form equal to Q(x e1 + y e2) and det[e1, e2] = 1."""
    e1, e2 = (1, 0), (0, 1)
    while True:
        t = math.floor(B / (2 * A) + Fraction(1, 2))
        if t:
            B, C = B - 2 * A * t, A * t * t - B * t + C
            e2 = (e2[0] - t * e1[0], e2[1] - t * e1[1])
        if C < A:
            A, B, C = C, -B, A
            e1, e2 = e2, (-e1[0], -e1[1])
            continue
        return A, B, C, e1, e2


def _complete(p: int, q: int) -> RationalTransform:
    """Unimodular matrix with first row (p, q)."""
    g, x, y = _ext_gcd(p, q)
    if g != 1:
        raise ValueError(f"({p}, {q}) is not primitive")
    # p*x + q*y = 1, so [[p, q], [-y, x]] has determinant 1
    return RationalTransform(p, q, -y, x)


def _ext_gcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _normalize_translation(f: Quartic) -> RationalTransform:
    """Translation X -> X + tY putting a1 in [0, |a0|) (or a2 in [0, 2|a1|) if a0 = 0)."""
    if f.a0 != 0:
        m = abs(f.a0)
        t = (f.a1 % m - f.a1) // f.a0
    else:
        m = 2 * abs(f.a1)
        t = (f.a2 % m - f.a2) // (2 * f.a1)
    return RationalTransform(1, 0, t, 1)


def _canonical_key(g: Quartic):
    a, H, R = seminvariants(g)
    return (abs(a), a, H, R, g.a4, g.a1, g.a2, g.a3)


def _candidate(f: Quartic, v) -> tuple[Quartic, RationalTransform]:
    gamma = _complete(*v)
    g = act(gamma, f)
    tr = _normalize_translation(g)
    return act(tr, g), tr @ gamma


def cremona_reduce(f: Quartic, max_radius: int = 1 << 12) -> ReducedRepresentative:
    """Canonical reduced representative of the SL2(Z)-class of f.

    Vectors are tried in order of their value under the covariant quadratic;
    among the first level holding a vector whose form lies in the reduced
    range, the lexicographically smallest (|a|, a, H, R, a4, a1, a2, a3)
    wins. In practice the level is always the minimum of Q.
    """
    Dt = conforming_dtilde(f)
    A, B, C, e1, e2 = _gauss_reduce(*covariant_quadratic(f, Dt))
    # On the reduced form Q >= A (x^2 + y^2) / 2, so Q <= lam*A forces x^2 + y^2 <= 2*lam.
    lam = 1
    while lam <= max_radius:
        r = math.isqrt(2 * lam)
        levels: dict[Fraction, list] = {}
        for x in range(0, r + 1):
            for y in range(-r, r + 1):
                if (x == 0 and y <= 0) or math.gcd(x, y) != 1:
                    continue
                val = A * x * x + B * x * y + C * y * y
                if val <= lam * A:
                    v = (x * e1[0] + y * e2[0], x * e1[1] + y * e2[1])
                    levels.setdefault(val, []).append(v)
        for val in sorted(levels):
            best = None
            for v in levels[val]:
                g, gamma = _candidate(f, v)
                a, H, _ = seminvariants(g)
                if in_reduced_range(a, H, Dt) and (best is None or _canonical_key(g) < _canonical_key(best[0])):
                    best = (g, gamma)
            if best is not None:
                return _finish(f, *best, Dt)
        lam *= 4
    raise RuntimeError(f"no reduced representative of {f} within radius {max_radius}")


def _finish(f, g, gamma, Dt) -> ReducedRepresentative:
    if not gamma.is_unimodular or act(gamma, f) != g:
        raise RuntimeError("recorded transform does not reproduce the reduced form")
    a, H, R = seminvariants(g)
    return ReducedRepresentative(g, gamma, a, H, R, Dt, reduction_case(a, H, Dt))


def canonical_class(f: Quartic) -> tuple:
    """Hashable invariant of the SL2(Z)-class of f (the reduced form's coefficients)."""
    return cremona_reduce(f).g.a


def syzygy_point(rep: ReducedRepresentative, Dtilde: int | None = None) -> SyzygyPoint:
    Dt = rep.Dtilde if Dtilde is None else Dtilde
    n = abs(rep.a * Dt)
    if rep.R % 2:
        raise RuntimeError(f"R={rep.R} is odd; syzygy violated")
    x, y = rep.H, rep.R // 2
    if y * y != x**3 - n * n * x:
        raise RuntimeError(f"({x}, {y}) is not on E_{n}; syzygy violated")
    return SyzygyPoint(x, y, n)


def resolvent_roots_j0(I) -> tuple:
    """Roots of X^3 - (I/4) X for a conforming I = 4 Dt^2."""
    ok, Dt = is_square(Fraction(I).numerator // 4) if Fraction(I).denominator == 1 and I % 4 == 0 else (False, None)
    if not ok:
        raise NonconformingInvariants(f"I={I} is not 4 times a square")
    return (-Dt, 0, Dt)


def pgl2_equivalent(f: Quartic, F: Quartic, phi) -> bool:
    """Rational equivalence test through the square class of (a phi + H)(a' phi + H')."""
    If, Jf, _ = invariants(f)
    IF, JF, _ = invariants(F)
    if (If, Jf) != (IF, JF):
        raise ValueError("forms have different invariants")
    # With J = 0 the two published signs of the resolvent agree.
    if Jf != 0:
        raise NonconformingInvariants(f"J={Jf} != 0")
    phi = Fraction(phi)
    if phi**3 - Fraction(If) / 4 * phi != 0:
        raise ValueError(f"{phi} is not a root of the resolvent")
    a, H, _ = seminvariants(f)
    a2, H2, _ = seminvariants(F)
    u, w = a * phi + H, a2 * phi + H2
    if u == 0 or w == 0:
        raise Degenerate(f"a*phi + H vanishes (phi={phi})")
    return is_rational_square(Fraction(u) * w)


def torsion_image_test(c: int, D: int) -> TorsionCases:
    """For each torsion value of H(g), whether its square-class condition holds.

    H = a Dt needs 2(D+c)c to be a square, H = 0 needs D^2 - c^2, and
    H = -a Dt needs 2(c-D)c. In terms of the descent quadruple these read
    D1D2 ~ 2, D2D3 ~ -1 and D1D3 ~ 2.
    """

    def sq(v):
        return v != 0 and is_rational_square(v)

    return TorsionCases(sq(2 * (D + c) * c), sq(D * D - c * c), sq(2 * (c - D) * c))
