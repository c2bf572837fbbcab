"""Bookkeeping along the cyclotomic Z_2-extension.

Splitting of odd primes in Q(zeta_{2^{n+2}}) and its real subfield, Kida's
formula for lambda^-, and the growth law of the 2-class numbers of the genus
fields F_n = Q(zeta_{2^{n+2}}, sqrt q1, sqrt q2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arith import is_prime, jacobi
from .unit_lattice import orient

# fixed inputs for the base k = Q(sqrt q1, i): lambda^-(k) = 0, and k_infinity holds i
BASE_LAMBDA_MINUS = 0
BASE_DELTA = 1


@dataclass(frozen=True)
class SplittingReport:
    q: int
    n: int
    modulus: int
    order_full: int
    count_full: int
    order_real: int
    count_real: int


@dataclass(frozen=True)
class KidaInput:
    degree: int
    lambda_minus_base: int
    delta_base: int
    delta_ext: int
    ram_sum: int
    ram_sum_plus: int

    def __post_init__(self):
        fields = (self.degree, self.lambda_minus_base, self.delta_base,
                  self.delta_ext, self.ram_sum, self.ram_sum_plus)
        if any(x < 0 for x in fields):
            raise ValueError("Kida inputs must be nonnegative")
        if self.degree < 1 or self.degree & (self.degree - 1):
            raise ValueError("degree must be a power of 2")
        if self.delta_base not in (0, 1) or self.delta_ext not in (0, 1):
            raise ValueError("delta values are 0 or 1")


def _order(q: int, modulus: int, up_to_sign: bool = False) -> int:
    x, k = q % modulus, 1
    while x != 1 and not (up_to_sign and x == modulus - 1):
        x = x * q % modulus
        k += 1
    return k


def splitting(q: int, n: int) -> SplittingReport:
    if q % 2 == 0 or q < 3:
        raise ValueError(f"splitting needs an odd prime, got {q}")
    if n < 1:
        raise ValueError("layer index must be >= 1")
    modulus = 2 ** (n + 2)
    phi = modulus // 2
    of = _order(q, modulus)
    orl = _order(q, modulus, up_to_sign=True)
    return SplittingReport(q, n, modulus, of, phi // of, orl, (phi // 2) // orl)


def kida_lambda_minus(inp: KidaInput) -> int:
    out = inp.delta_ext + inp.degree * (inp.lambda_minus_base - inp.delta_base) + inp.ram_sum - inp.ram_sum_plus
    if out < 0:
        raise ValueError(f"Kida's formula gives a negative lambda^- ({out}); inputs inconsistent")
    return out


def genus_growth(m: int, n: int, s: int | None = None) -> int:
    """2-class number 2^(n+s) of F_n, with s = m - 2 unless given."""
    if m < 2:
        raise ValueError("m must be >= 2")
    if n < 1:
        raise ValueError("layer index must be >= 1")
    if s is None:
        s = m - 2
    return 2 ** (n + s)


def primes_above_in_compositum(q2: int, q1: int, n: int) -> tuple[int, int]:
    """Primes above q2 in Q(sqrt q1, zeta_{2^{n+2}}) and in its maximal real subfield.

    Frobenius orders combine by lcm over the two linearly disjoint pieces.
    """
    sp = splitting(q2, n)
    quad_order = 1 if jacobi(q1, q2) == 1 else 2
    full_deg, real_deg = 2 * (sp.modulus // 2), 2 * (sp.modulus // 4)
    full = full_deg // math.lcm(quad_order, sp.order_full)
    real = real_deg // math.lcm(quad_order, sp.order_real)
    return full, real


def kida_input_for_pair(q1: int, q2: int, n: int = 10) -> KidaInput:
    for q in (q1, q2):
        if not is_prime(q) or q % 8 != 3:
            raise ValueError(f"{q} must be a prime = 3 (mod 8)")
    if q1 == q2:
        raise ValueError("q1 and q2 must differ")
    q1, q2 = orient(q1, q2)
    # ramification in F_inf / k_inf is at primes above q2 only, each with e = 2
    full, real = primes_above_in_compositum(q2, q1, n)
    return KidaInput(
        degree=2,
        lambda_minus_base=BASE_LAMBDA_MINUS,
        delta_base=BASE_DELTA,
        delta_ext=1,
        ram_sum=full * (2 - 1),
        ram_sum_plus=real * (2 - 1),
    )


def kida_for_pair(q1: int, q2: int, n: int = 10) -> int:
    return kida_lambda_minus(kida_input_for_pair(q1, q2, n))
