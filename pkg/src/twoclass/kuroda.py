"""Kuroda's class number formula for multiquadratic fields, on 2-parts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .quadratic import ClassData, class_data
from .unit_lattice import MultiQuadField, subfields


class KurodaInconsistency(ArithmeticError):
    """The formula produced a value that cannot be a 2-class number."""


@dataclass(frozen=True)
class KurodaInput:
    field: MultiQuadField
    q_index: int
    subfield_class: dict[int, ClassData]

    @classmethod
    def build(cls, field: MultiQuadField, q_index: int) -> "KurodaInput":
        return cls(field, q_index, {d: class_data(d) for d in subfields(field)})

    def __post_init__(self):
        if set(self.subfield_class) != set(subfields(self.field)):
            raise ValueError("subfield_class must cover exactly the quadratic subfields")
        if self.q_index < 1 or self.q_index & (self.q_index - 1):
            raise ValueError(f"unit index must be a power of 2, got {self.q_index}")


def kuroda_v(n: int, is_real: bool) -> int:
    """Exponent v of 2 for a field of degree 2^n."""
    if n < 2:
        raise ValueError("the formula needs degree 2^n with n >= 2")
    if is_real:
        return n * (2 ** (n - 1) - 1)
    return (n - 1) * (2 ** (n - 2) - 1) + 2 ** (n - 1) - 1


def _h2_product(subfield_class: dict[int, ClassData]) -> int:
    out = 1
    for cd in subfield_class.values():
        out *= cd.h2
    return out


def kuroda_value(inp: KurodaInput) -> Fraction:
    v = kuroda_v(inp.field.k, inp.field.is_real)
    return Fraction(inp.q_index * _h2_product(inp.subfield_class), 2**v)


def kuroda_h2(inp: KurodaInput) -> int:
    val = kuroda_value(inp)
    if val.denominator != 1 or val < 1:
        raise KurodaInconsistency(
            f"q = {inp.q_index} gives h2 = {val} for {inp.field}, not a positive integer"
        )
    return val.numerator


def solve_q_index(field: MultiQuadField, target_h2: int) -> int:
    """The unit index that makes the formula return ``target_h2``."""
    v = kuroda_v(field.k, field.is_real)
    prod = _h2_product({d: class_data(d) for d in subfields(field)})
    q = Fraction(target_h2 * 2**v, prod)
    if q.denominator != 1 or q.numerator & (q.numerator - 1):
        raise KurodaInconsistency(f"no power-of-2 unit index gives h2 = {target_h2} for {field}")
    return q.numerator


def genus_fields(q1: int, q2: int) -> dict[str, MultiQuadField]:
    """The fields used around the pair: F1, F, F+, L and K = Q(sqrt(-q1), sqrt q2, sqrt 2)."""
    return {
        "F1": MultiQuadField([-1, 2, q1, q2]),
        "F": MultiQuadField([-1, q1, q2]),
        "F+": MultiQuadField([q1, q2]),
        "L": MultiQuadField([2, q1, q2]),
        "K": MultiQuadField([-q1, q2, 2]),
    }
