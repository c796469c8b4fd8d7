"""Exact integer number theory shared by the rest of the package.

Nothing in here touches floating point except ``prime_window``, which only
produces the real endpoints of a prime-size window for reporting and
classification.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np
from sympy import factorint, isprime

# Above this many entries the sieve refuses to allocate.
SIEVE_MEMORY_BUDGET = 5 * 10**7


class ResourceLimitError(RuntimeError):
    """Raised when a request exceeds a configured size budget."""


@dataclass(frozen=True)
class PrimeFactorization:
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        primes = [p for p, _ in self.factors]
        if primes != sorted(set(primes)) or any(e < 1 for _, e in self.factors):
            raise ValueError(f"malformed factorization {self.factors}")

    @property
    def value(self) -> int:
        return math.prod(p**e for p, e in self.factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a|n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs odd positive modulus, got {n}")
    a %= n
    sign = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def factorize(n: int) -> PrimeFactorization:
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    return PrimeFactorization(tuple(sorted(factorint(n).items())))


def squarefree_part(n: int) -> int:
    """The squarefree s with n = s*m^2, keeping the sign of n."""
    if n == 0:
        raise ValueError("0 has no squarefree part")
    s = math.prod(p for p, e in factorize(abs(n)) if e % 2)
    return s if n > 0 else -s


def square_class(q: Fraction | int) -> int:
    """Squarefree integer representing q in Q*/(Q*)^2."""
    q = Fraction(q)
    return squarefree_part(q.numerator * q.denominator)


def is_rational_square(q: Fraction | int) -> bool:
    q = Fraction(q)
    return q != 0 and square_class(q) == 1


def omega(n: int) -> int:
    if n < 1:
        raise ValueError(f"omega needs n >= 1, got {n}")
    return len(factorize(n))


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for _, e in factorize(abs(n)))


def odd_part(n: int) -> int:
    n = abs(n)
    while n and n % 2 == 0:
        n //= 2
    return n


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def squarefree_divisors(n: int) -> list[int]:
    """Positive squarefree divisors of |n|, ascending."""
    primes = factorize(abs(n)).primes
    out = [math.prod(c) for r in range(len(primes) + 1) for c in combinations(primes, r)]
    return sorted(out)


def is_square(n: int) -> tuple[bool, int | None]:
    if n < 0:
        return False, None
    r = math.isqrt(n)
    return (True, r) if r * r == n else (False, None)


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).astype(np.int64)


@dataclass(frozen=True)
class SquarefreeTable:
    """Squarefree integers up to ``limit`` with their omega values."""

    limit: int
    values: np.ndarray
    omega: np.ndarray

    def __len__(self):
        return len(self.values)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return zip(self.values.tolist(), self.omega.tolist())


def squarefree_sieve(limit: int, budget: int = SIEVE_MEMORY_BUDGET) -> SquarefreeTable:
    if limit < 1:
        raise ValueError(f"sieve limit must be >= 1, got {limit}")
    if limit > budget:
        raise ResourceLimitError(f"sieve limit {limit} exceeds memory budget {budget}")
    sf = np.ones(limit + 1, dtype=bool)
    sf[0] = False
    om = np.zeros(limit + 1, dtype=np.int8)
    for p in primes_up_to(limit).tolist():
        om[p::p] += 1
        if p * p <= limit:
            sf[p * p :: p * p] = False
    values = np.flatnonzero(sf).astype(np.int64)
    omegas = om[values].astype(np.int64)
    values.setflags(write=False)
    omegas.setflags(write=False)
    return SquarefreeTable(limit, values, omegas)


def _sqrt_mod_prime(c: int, p: int) -> int | None:
    """Smallest square root of c modulo odd prime p (Tonelli-Shanks)."""
    c %= p
    if c == 0:
        return 0
    if pow(c, (p - 1) // 2, p) != 1:
        return None
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, cc, t, r = s, pow(z, q, p), pow(c, q, p), pow(c, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(cc, 1 << (m - i - 1), p)
        m, cc, t, r = i, b * b % p, t * b * b % p, r * b % p
    return min(r, p - r)


def sqrt_lift(c: int, p: int, e: int, base: int | None = None) -> int | None:
    """Square root of c modulo p**e, or None if c is a non-residue.

    The returned root reduces to ``base`` modulo p when ``base`` is given,
    otherwise to the smallest nonnegative root modulo p.
    """
    if p % 2 == 0 or p < 3:
        raise ValueError(f"sqrt_lift needs an odd prime, got {p}")
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if e < 1:
        raise ValueError(f"exponent must be positive, got {e}")
    q = p**e
    c %= q
    if c % p == 0:
        # Root divisible by p: strip an even power of p and recurse.
        if c == 0:
            return 0
        v = valuation(c, p)
        if v % 2:
            return None
        r = sqrt_lift(c // p**v, p, e - v)
        if r is None:
            return None
        return (r * p ** (v // 2)) % q
    r = _sqrt_mod_prime(c, p)
    if r is None:
        return None
    if base is not None:
        if (base * base - c) % p:
            raise ValueError(f"{base} is not a square root of {c} mod {p}")
        r = base % p
    # Newton iteration doubles the precision each step.
    mod = p
    while mod < q:
        mod = min(mod * mod, q)
        r = (r - (r * r - c) * pow(2 * r, -1, mod)) % mod
    return r % q


def crt(residues: Sequence[tuple[int, int]]) -> int:
    """Solve x = r_i (mod m_i) for pairwise coprime m_i; result in [0, prod m_i)."""
    x, mod = 0, 1
    for r, m in residues:
        if m < 1:
            raise ValueError(f"modulus must be positive, got {m}")
        if math.gcd(mod, m) != 1:
            raise ValueError(f"moduli not pairwise coprime at {m}")
        x = x + mod * ((r - x) * pow(mod, -1, m) % m)
        mod *= m
    return x % mod


def legendre_ok(u: int, p: int) -> bool:
    return jacobi(u % p, p) == 1


def is_padic_square(n: int, p: int) -> bool:
    """Whether the nonzero integer n is a square in Q_p."""
    if n == 0:
        raise ValueError("0 has no square class")
    v = valuation(n, p)
    if v % 2:
        return False
    u = n // p**v
    if p == 2:
        return u % 8 == 1
    return jacobi(u % p, p) == 1


def prime_window(N: int, eps: float) -> tuple[float, float]:
    """Open interval (lo, hi) with eps*loglogN < loglog p < (1-eps)*loglogN."""
    if N < 16:
        raise ValueError(f"window needs N >= 16, got {N}")
    if not 0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    L = math.log(math.log(N))
    return math.exp(math.exp(eps * L)), math.exp(math.exp((1 - eps) * L))


def in_window(p: int, window: tuple[float, float]) -> bool:
    lo, hi = window
    return lo < p < hi
