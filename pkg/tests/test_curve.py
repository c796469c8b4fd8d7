from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from twistpoints.curve import (
    INFINITY,
    IntegralPoint,
    OffCurveError,
    RationalPoint,
    TwistCurve,
    add,
    is_torsion,
    multiply,
    neg,
    on_curve,
    torsion,
)

E5 = TwistCurve(5)
P, Q = IntegralPoint(-4, 6), IntegralPoint(45, 300)


def test_curve_validation():
    assert TwistCurve(6).discriminant == 64 * 6**6
    for bad in (0, -5, 12, 2.0):
        with pytest.raises(ValueError):
            TwistCurve(bad)


def test_torsion_points():
    T = torsion(E5)
    assert len(T) == 4 and all(on_curve(E5, t) for t in T)
    for t in T:
        assert add(E5, t, t) is INFINITY
        assert is_torsion(E5, t)


def test_addition_examples():
    assert add(E5, P, IntegralPoint(-5, 0)) == RationalPoint(45, -300)
    R = add(E5, Q, IntegralPoint(5, 0))
    assert R.x == Fraction(25, 4) and on_curve(E5, R)
    assert add(E5, P, neg(P)) is INFINITY
    assert add(E5, INFINITY, P) == P.as_rational()


def test_add_rejects_off_curve():
    with pytest.raises(OffCurveError):
        add(E5, (1, 1), P)


def _chord(p, q, D):
    # textbook formula, kept independent of the implementation
    if p.x == q.x:
        lam = (3 * p.x**2 - D * D) / (2 * p.y)
    else:
        lam = (q.y - p.y) / (q.x - p.x)
    x = lam**2 - p.x - q.x
    return x, lam * (p.x - x) - p.y


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_group_law_properties(m, n):
    mP = multiply(E5, m, P)
    nP = multiply(E5, n, P)
    assert on_curve(E5, mP) and on_curve(E5, nP)
    assert add(E5, mP, nP) == multiply(E5, m + n, P)
    assert add(E5, mP, nP) == add(E5, nP, mP)
    if mP is not INFINITY and nP is not INFINITY and not (mP.x == nP.x and mP.y == -nP.y):
        x, y = _chord(mP, nP, 5)
        s = add(E5, mP, nP)
        assert (s.x, s.y) == (x, y)


def test_associativity_small():
    pts = [P, Q, IntegralPoint(0, 0), add(E5, P, Q)]
    for a in pts:
        for b in pts:
            for c in pts:
                assert add(E5, add(E5, a, b), c) == add(E5, a, add(E5, b, c))
