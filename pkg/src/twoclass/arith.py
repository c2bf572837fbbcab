"""Integer primitives: symbols, squares, factorization, prime representations."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

TRIAL_LIMIT = 10**6
RHO_BUDGET = 10**6

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class FactorizationError(ArithmeticError):
    """A cofactor could not be split within the iteration budget."""


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out


@dataclass(frozen=True)
class Representation:
    """A solution of ``p = c1*a^2 + c2*b^2`` in nonnegative integers."""

    p: int
    c1: int
    c2: int
    a: int
    b: int

    def holds(self) -> bool:
        return self.c1 * self.a**2 + self.c2 * self.b**2 == self.p


def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"jacobi symbol needs an odd positive modulus, got {n}")
    a %= n
    acc = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                acc = -acc
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            acc = -acc
        a %= n
    return acc if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for arbitrary n, used for splitting in quadratic fields."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    acc = 1
    if n < 0:
        n = -n
        if a < 0:
            acc = -acc
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            acc = -acc
    if n == 1:
        return acc
    return acc * jacobi(a, n)


def is_perfect_square(n: int) -> int | None:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < 3317044064679887385961981:
        bases = _SMALL_PRIMES
    else:
        rng = random.Random(n)
        bases = tuple(rng.randrange(2, n - 1) for _ in range(40))
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_upto(bound: int) -> list[int]:
    """Primes ``p < bound`` by a plain sieve."""
    if bound < 3:
        return []
    sieve = bytearray([1]) * bound
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(bound - 1) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytes(len(range(p * p, bound, p)))
    return [i for i, flag in enumerate(sieve) if flag]


def _brent(n: int, budget: int) -> int:
    # Pollard rho with Brent's cycle detection; returns a proper divisor
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    spent = 0
    while spent < budget:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
            spent += r
            if spent > budget:
                break
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    raise FactorizationError(f"rho budget exhausted on {n}")


def factorize(n: int, budget: int = RHO_BUDGET) -> Factorization:
    if n < 1:
        raise ValueError(f"factorize needs a positive integer, got {n}")
    found: dict[int, int] = {}
    m = n
    p = 2
    while p * p <= m and p < TRIAL_LIMIT:
        while m % p == 0:
            found[p] = found.get(p, 0) + 1
            m //= p
        p += 1 if p == 2 else 2
    stack = [m] if m > 1 else []
    while stack:
        c = stack.pop()
        if is_prime(c):
            found[c] = found.get(c, 0) + 1
            continue
        r = is_perfect_square(c)
        if r is not None:
            stack += [r, r]
            continue
        g = _brent(c, budget)
        stack += [g, c // g]
    return Factorization(n, tuple(sorted(found.items())))


def squarefree_part(n: int) -> int:
    if n == 0:
        raise ValueError("squarefree part of 0 is undefined")
    out = 1
    for p, e in factorize(abs(n)).factors:
        if e % 2:
            out *= p
    return out if n > 0 else -out


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for _, e in factorize(abs(n)).factors)


def quartic_residue_2(p: int) -> int:
    """+1 when 2 is a fourth power modulo ``p``, else -1 (needs p = 1 mod 8)."""
    if p % 8 != 1:
        raise ValueError(f"quartic character of 2 needs p = 1 (mod 8), got {p}")
    r = pow(2, (p - 1) // 4, p)
    if r == 1:
        return 1
    if r == p - 1:
        return -1
    raise ValueError(f"{p} is not prime")


DEFAULT_INDEFINITE_BOUND = 10**4


def _pell_one(D: int) -> tuple[int, int]:
    # least x^2 - D*y^2 = 1 with y > 0, by continued fractions of sqrt(D)
    a0 = math.isqrt(D)
    m, d, a = 0, 1, a0
    p0, p1, q0, q1 = 1, a0, 0, 1
    while p1 * p1 - D * q1 * q1 != 1:
        m = d * a - m
        d = (D - m * m) // d
        a = (a0 + m) // d
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
    return p1, q1


def _nagell_bound(p: int, D: int) -> int:
    # fundamental solutions of x^2 - D*y^2 = p (p > 0) have y <= y1*sqrt(p/(2(x1+1)))
    x1, y1 = _pell_one(D)
    return math.isqrt(y1 * y1 * p // (2 * (x1 + 1))) + 1


def represent(p: int, c1: int, c2: int, bound: int | None = None) -> list[Representation]:
    """All ``(a, b)`` with ``c1*a^2 + c2*b^2 = p``, ``a, b >= 0``, sorted by ``a``.

    For ``c2 < 0`` the search runs over ``b <= bound``.  When ``c1 == 1`` and
    ``-c2`` is not a square, the default bound is Nagell's bound, so the list
    holds one solution per class under the unit group of the order.
    """
    if c1 <= 0 or c2 == 0:
        raise ValueError("need c1 > 0 and c2 != 0")
    out = []
    if c2 > 0:
        b = 0
        while c2 * b * b <= p:
            rest = p - c2 * b * b
            if rest % c1 == 0:
                a = is_perfect_square(rest // c1)
                if a is not None:
                    out.append(Representation(p, c1, c2, a, b))
            b += 1
    else:
        if bound is None:
            if c1 == 1 and is_perfect_square(-c2) is None and p > 0:
                bound = _nagell_bound(p, -c2)
            else:
                bound = DEFAULT_INDEFINITE_BOUND
        for b in range(bound + 1):
            rest = p - c2 * b * b
            if rest >= 0 and rest % c1 == 0:
                a = is_perfect_square(rest // c1)
                if a is not None:
                    out.append(Representation(p, c1, c2, a, b))
    out.sort(key=lambda r: (r.a, r.b))
    return out
