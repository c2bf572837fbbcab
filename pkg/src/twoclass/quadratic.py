"""Fundamental units and class numbers of quadratic fields Q(sqrt(d)).

Class numbers come from binary quadratic forms: reduced definite forms are
counted directly, reduced indefinite forms are partitioned into cycles of the
rho operator.  The wide class number is the headline value; the narrow one is
only kept to reconcile the form count with the norm of the fundamental unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import factorize, is_squarefree


@dataclass(frozen=True)
class PellSolution:
    """Fundamental unit ``(x_num + y_num*sqrt(d)) / denom`` of norm ``norm``."""

    d: int
    x_num: int
    y_num: int
    denom: int
    norm: int

    def check(self) -> bool:
        return self.x_num**2 - self.d * self.y_num**2 == self.norm * self.denom**2

    @property
    def integral(self) -> bool:
        return self.denom == 1

    def __str__(self):
        core = f"{self.x_num} + {self.y_num}*sqrt({self.d})"
        return core if self.denom == 1 else f"({core})/{self.denom}"


@dataclass(frozen=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        D = self.disc
        a, b, c = self.a, self.b, self.c
        if D < 0:
            if a <= 0 or not abs(b) <= a <= c:
                return False
            return b >= 0 if (abs(b) == a or a == c) else True
        # 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b
        if b <= 0 or b * b >= D:
            return False
        two_a = 2 * abs(a)
        if (two_a + b) ** 2 <= D:
            return False
        return two_a - b < 0 or (two_a - b) ** 2 < D

    def rho(self) -> "QuadForm":
        """One step of the indefinite reduction operator."""
        D = self.disc
        s = math.isqrt(D)
        c2 = 2 * abs(self.c)
        b = s - (s + self.b) % c2
        return QuadForm(self.c, b, (b * b - D) // (4 * self.c))


@dataclass(frozen=True)
class ClassData:
    d: int
    disc: int
    h_wide: int
    h_narrow: int
    h2: int
    m: int


def fundamental_discriminant(d: int) -> int:
    if d in (0, 1) or not is_squarefree(d):
        raise ValueError(f"{d} is not a squarefree integer other than 0, 1")
    return d if d % 4 == 1 else 4 * d


def check_fundamental(disc: int) -> None:
    if disc % 4 == 1:
        core = disc
    elif disc % 4 == 0 and (disc // 4) % 4 in (2, 3):
        core = disc // 4
    else:
        raise ValueError(f"{disc} is not a fundamental discriminant")
    if core == 1 or not is_squarefree(core):
        raise ValueError(f"{disc} is not a fundamental discriminant")


@lru_cache(maxsize=4096)
def fundamental_unit(d: int) -> PellSolution:
    if d < 2 or not is_squarefree(d):
        raise ValueError(f"fundamental_unit needs a squarefree d >= 2, got {d}")
    s = math.isqrt(d)
    # expand omega = (P + sqrt(d))/Q; omega = (1 + sqrt d)/2 when d = 1 mod 4
    half = d % 4 == 1
    P, Q = (1, 2) if half else (0, 1)
    p0, p1, q0, q1 = 0, 1, 1, 0
    while True:
        a = (P + s) // Q
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        p, q = p1, q1
        if half:
            norm = p * p - p * q - q * q * ((d - 1) // 4)
        else:
            norm = p * p - d * q * q
        if norm in (1, -1):
            break
        P = a * Q - P
        Q = (d - P * P) // Q
    if half:
        x, y, den = 2 * p - q, q, 2
        if x % 2 == 0 and y % 2 == 0:
            x, y, den = x // 2, y // 2, 1
    else:
        x, y, den = p, q, 1
    sol = PellSolution(d, x, y, den, norm)
    assert sol.check()
    return sol


def _imag_reduced_count(disc: int) -> int:
    # a-outer enumeration: for each a, count admissible b in (-a, a]
    N = -disc
    total = 0
    a = 1
    while 3 * a * a <= N:
        b = np.arange(-a + 1, a + 1, dtype=np.int64)
        b = b[(b - disc) % 2 == 0]
        num = b * b + N
        ok = num % (4 * a) == 0
        c = num // (4 * a)
        ok &= c >= a
        ok &= ~((c == a) & (b < 0))
        total += int(ok.sum())
        a += 1
    return total


def reduced_forms_imaginary(disc: int) -> list[QuadForm]:
    check_fundamental(disc)
    if disc >= 0:
        raise ValueError("need a negative discriminant")
    out = []
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b * b - disc) % (4 * a):
                continue
            f = QuadForm(a, b, (b * b - disc) // (4 * a))
            if f.is_reduced():
                out.append(f)
        a += 1
    return out


@lru_cache(maxsize=65536)
def class_number_imaginary(disc: int) -> int:
    if disc >= 0:
        raise ValueError("class_number_imaginary needs a negative discriminant")
    check_fundamental(disc)
    return _imag_reduced_count(disc)


def reduced_forms_real(disc: int) -> list[QuadForm]:
    """All reduced indefinite forms of discriminant ``disc`` (both signs of a)."""
    check_fundamental(disc)
    if disc <= 0:
        raise ValueError("need a positive discriminant")
    s = math.isqrt(disc)
    out = []
    for b in range(disc % 2 or 2, s + 1, 2):
        if b * b >= disc:
            break
        N = (disc - b * b) // 4
        lo = (s - b) // 2 + 1 if (s - b) >= 0 else 1
        lo = max(lo - 1, 1)
        hi = (s + b) // 2 + 1
        cand = np.arange(lo, hi + 1, dtype=np.int64)
        cand = cand[N % cand == 0]
        for A in cand.tolist():
            for a in (A, -A):
                f = QuadForm(a, b, -N // a)
                if f.is_reduced():
                    out.append(f)
    return out


@lru_cache(maxsize=65536)
def _narrow_cycles(disc: int) -> int:
    forms = set(reduced_forms_real(disc))
    seen: set[QuadForm] = set()
    cycles = 0
    for f in sorted(forms, key=lambda g: (g.b, g.a)):
        if f in seen:
            continue
        cycles += 1
        g = f
        while g not in seen:
            seen.add(g)
            g = g.rho()
            assert g in forms, f"rho left the reduced set at {g}"
    return cycles


def class_number_real(disc: int) -> tuple[int, int]:
    """``(h_narrow, h_wide)`` for a positive fundamental discriminant."""
    if disc <= 0:
        raise ValueError("class_number_real needs a positive discriminant")
    check_fundamental(disc)
    h_narrow = _narrow_cycles(disc)
    d = disc if disc % 4 == 1 else disc // 4
    if fundamental_unit(d).norm == -1:
        return h_narrow, h_narrow
    return h_narrow, h_narrow // 2


def two_part(h: int) -> tuple[int, int]:
    m = (h & -h).bit_length() - 1
    return 1 << m, m


@lru_cache(maxsize=65536)
def class_data(d: int) -> ClassData:
    disc = fundamental_discriminant(d)
    if d < 0:
        h_narrow = h_wide = class_number_imaginary(disc)
    else:
        h_narrow, h_wide = class_number_real(disc)
    h2, m = two_part(h_wide)
    return ClassData(d, disc, h_wide, h_narrow, h2, m)


def h2(d: int) -> int:
    return class_data(d).h2


def unit_nonsquare_values(d: int) -> dict[str, int]:
    """Integers that must not be squares when the unit of Q(sqrt d) has norm +1.

    With ``eps = x + y*sqrt(d)``: 2(x+1), 2(x-1), 2d(x+1), 2d(x-1); for
    ``d = 1 mod 4`` also x+1, x-1 and p(x+1), p(x-1) for primes p | d.
    Half-integral units are scaled by 2 first, which preserves squareness.
    Returns an empty dict for units of norm -1.
    """
    u = fundamental_unit(d)
    if u.norm != 1:
        return {}
    if u.denom == 1:
        X, scale = u.x_num, 1
    else:
        # eps = (X + Y sqrt d)/2; x = X/2 so k(x +- 1) square <=> 2k(X +- 2) square
        X, scale = u.x_num, 2
    one = scale
    out = {
        "2(x+1)": 2 * scale * (X + one),
        "2(x-1)": 2 * scale * (X - one),
        "2d(x+1)": 2 * d * scale * (X + one),
        "2d(x-1)": 2 * d * scale * (X - one),
    }
    if d % 4 == 1:
        out["x+1"] = scale * (X + one)
        out["x-1"] = scale * (X - one)
        for p in factorize(d).primes():
            out[f"{p}(x+1)"] = p * scale * (X + one)
            out[f"{p}(x-1)"] = p * scale * (X - one)
    return out

