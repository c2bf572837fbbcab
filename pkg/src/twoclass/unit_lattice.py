"""Exact arithmetic and unit groups in multiquadratic fields.

A multiquadratic field is stored through an F2-independent list of squarefree
generators ``g_0, ..., g_{k-1}``.  Its basis is ``sqrt(m_S)`` for every subset
``S`` of generators, ``m_S`` being the squarefree part of the product (with
``sqrt(m) = i*sqrt(|m|)`` for ``m < 0``).  Elements are integer coordinate
vectors over that basis with one positive common denominator.

Square roots are extracted exactly by descending the tower
``Q(sqrt g_0) ⊂ Q(sqrt g_0, sqrt g_1) ⊂ ...``: writing ``x = u + v*sqrt(g)``,
a root ``s + t*sqrt(g)`` forces ``s^2 = (u ± sqrt(u^2 - g v^2)) / 2``.  Every
root returned is re-checked by squaring.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .arith import is_perfect_square, is_prime, jacobi, squarefree_part
from .quadratic import PellSolution, fundamental_unit

log = logging.getLogger(__name__)

MAX_COEFF_BITS = 1 << 20


class IdentityFailure(AssertionError):
    """An identity asserted for all admissible inputs failed on one of them."""


class HypothesisError(ValueError):
    """Inputs fall outside the residue/symbol conditions an operation needs."""


# --------------------------------------------------------------------------
# fields


class MultiQuadField:
    def __init__(self, gens: Iterable[int]):
        kept: list[int] = []
        span = {1}
        for g in gens:
            g = squarefree_part(int(g))
            if g in span:
                continue
            kept.append(g)
            span |= {squarefree_part(s * g) for s in span}
        if not kept:
            raise ValueError("a multiquadratic field needs at least one generator")
        self.gens = tuple(kept)
        self.k = len(kept)
        self.degree = 1 << self.k
        self.is_real = all(g > 0 for g in kept)
        basis = []
        for S in range(self.degree):
            m = 1
            for i, g in enumerate(kept):
                if S >> i & 1:
                    m *= g
            basis.append(squarefree_part(m))
        self.basis = tuple(basis)
        self.mask_of = {m: S for S, m in enumerate(basis)}
        n = self.degree
        table = [[0] * n for _ in range(n)]
        for S in range(n):
            for T in range(n):
                mS, mT, mU = basis[S], basis[T], basis[S ^ T]
                k2 = mS * mT // mU
                k = is_perfect_square(k2)
                assert k is not None and k * k * mU == mS * mT
                table[S][T] = -k if (mS < 0 and mT < 0) else k
        self._table = table

    @classmethod
    def of(cls, *gens: int) -> "MultiQuadField":
        return cls(gens)

    def __repr__(self):
        return f"MultiQuadField({list(self.gens)})"

    def __eq__(self, other):
        return isinstance(other, MultiQuadField) and self.gens == other.gens

    def __hash__(self):
        return hash(self.gens)

    def contains_class(self, m: int) -> bool:
        return squarefree_part(m) in self.mask_of

    def real_subfield(self) -> "MultiQuadField":
        if self.is_real:
            return self
        positives = [m for m in self.basis if m > 1]
        return MultiQuadField(sorted(positives, key=abs))

    # elements

    def zero(self) -> "FieldElement":
        return FieldElement(self, (0,) * self.degree, 1)

    def scalar(self, q) -> "FieldElement":
        q = Fraction(q)
        num = [0] * self.degree
        num[0] = q.numerator
        return FieldElement(self, tuple(num), q.denominator)

    def sqrt_of(self, m: int) -> "FieldElement":
        """The basis element ``sqrt(m)`` for a squarefree class ``m`` of the field."""
        S = self.mask_of.get(m)
        if S is None:
            raise ValueError(f"sqrt({m}) is not a basis element of {self}")
        num = [0] * self.degree
        num[S] = 1
        return FieldElement(self, tuple(num), 1)

    def element(self, coords: dict[int, object]) -> "FieldElement":
        """Element ``sum(c * sqrt(m))`` from a map ``m -> rational c``."""
        fr = {m: Fraction(c) for m, c in coords.items() if c}
        den = 1
        for c in fr.values():
            den = den * c.denominator // math.gcd(den, c.denominator)
        num = [0] * self.degree
        for m, c in fr.items():
            S = self.mask_of.get(m)
            if S is None:
                raise ValueError(f"sqrt({m}) is not a basis element of {self}")
            num[S] += c.numerator * (den // c.denominator)
        return FieldElement(self, tuple(num), den)

    def pell_element(self, u: PellSolution) -> "FieldElement":
        return self.element({1: Fraction(u.x_num, u.denom), u.d: Fraction(u.y_num, u.denom)})

    def lift(self, x: "FieldElement") -> "FieldElement":
        """Reinterpret an element of a subfield as an element of this field."""
        return self.element(x.coords())


def subfields(field: MultiQuadField) -> list[int]:
    """Nontrivial square classes (the quadratic subfields), sorted by |m| then sign."""
    return sorted((m for m in field.basis if m != 1), key=lambda m: (abs(m), m < 0))


# --------------------------------------------------------------------------
# elements


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


@dataclass(frozen=True, eq=False)
class FieldElement:
    field: MultiQuadField
    num: tuple[int, ...]
    den: int = 1

    def __post_init__(self):
        g = self.den
        for c in self.num:
            if g == 1:
                break
            g = math.gcd(g, c)
        if self.den < 0:
            g = -g
        if g != 1:
            object.__setattr__(self, "num", tuple(c // g for c in self.num))
            object.__setattr__(self, "den", self.den // g)

    # structure

    def coords(self) -> dict[int, Fraction]:
        return {
            self.field.basis[S]: Fraction(c, self.den) for S, c in enumerate(self.num) if c
        }

    def coord(self, m: int) -> Fraction:
        return Fraction(self.num[self.field.mask_of[m]], self.den)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def level(self) -> int:
        top = max((S for S, c in enumerate(self.num) if c), default=0)
        return top.bit_length()

    def bits(self) -> int:
        return max(max((abs(c).bit_length() for c in self.num), default=0), self.den.bit_length())

    def _with(self, num, den=1) -> "FieldElement":
        return FieldElement(self.field, tuple(num), den)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        return self.field.scalar(other)

    # arithmetic

    def __add__(self, other):
        o = self._coerce(other)
        d = _lcm(self.den, o.den)
        a, b = d // self.den, d // o.den
        return self._with([x * a + y * b for x, y in zip(self.num, o.num)], d)

    __radd__ = __add__

    def __neg__(self):
        return self._with([-x for x in self.num], self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, FieldElement):
            q = Fraction(other)
            return self._with([x * q.numerator for x in self.num], self.den * q.denominator)
        o = self._coerce(other)
        table = self.field._table
        out = [0] * self.field.degree
        right = [(T, y) for T, y in enumerate(o.num) if y]
        for S, x in enumerate(self.num):
            if not x:
                continue
            row = table[S]
            for T, y in right:
                out[S ^ T] += x * y * row[T]
        return self._with(out, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, FieldElement):
            return self * other.inverse()
        q = Fraction(other)
        return self * (1 / q)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = self.field.scalar(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            try:
                other = self.field.scalar(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.field == other.field and self.den == other.den and self.num == other.num

    def __hash__(self):
        return hash((self.field.gens, self.num, self.den))

    # tower decomposition

    def split(self, level: int) -> tuple["FieldElement", "FieldElement"]:
        """``(u, v)`` below ``level - 1`` with ``self = u + v*sqrt(g_{level-1})``."""
        bit = 1 << (level - 1)
        u = [c if S < bit else 0 for S, c in enumerate(self.num)]
        w = [c if bit <= S < 2 * bit else 0 for S, c in enumerate(self.num)]
        assert not any(self.num[2 * bit :]), "element above the requested level"
        g = self.field.gens[level - 1]
        v = self._with(w, self.den) * self.field.sqrt_of(self.field.basis[bit]) / g
        return self._with(u, self.den), v

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return _inverse(self, self.level())

    def conjugate(self, flips: int) -> "FieldElement":
        """Apply the automorphism negating ``sqrt(g_i)`` for each bit ``i`` of ``flips``."""
        return self._with(
            [-c if bin(S & flips).count("1") % 2 else c for S, c in enumerate(self.num)], self.den
        )

    def complex_conjugate(self) -> "FieldElement":
        return self._with(
            [-c if self.field.basis[S] < 0 else c for S, c in enumerate(self.num)], self.den
        )

    def norm_to(self, flips: Sequence[int]) -> "FieldElement":
        """Product of the conjugates under the subgroup generated by ``flips``."""
        group = {0}
        for f in flips:
            group |= {h ^ f for h in group}
        out = self.field.scalar(1)
        for h in sorted(group):
            out = out * self.conjugate(h)
        return out

    # real embeddings

    def signs(self) -> tuple[int, ...]:
        """Signs under every real embedding; index bit i set means sqrt(g_i) -> -sqrt(g_i)."""
        if not self.field.is_real:
            raise ValueError("signs need a totally real field")
        return tuple(_signs(self, self.field.k))

    def negative_mask(self) -> int:
        out = 0
        for e, s in enumerate(self.signs()):
            if s < 0:
                out |= 1 << e
        return out

    def evaluate(self, embedding: int = 0, dps: int = 50):
        import mpmath

        with mpmath.workdps(dps):
            total = mpmath.mpf(0)
            for S, c in enumerate(self.num):
                if not c:
                    continue
                sgn = -1 if bin(S & embedding).count("1") % 2 else 1
                total += sgn * c * mpmath.sqrt(self.field.basis[S])
            return total / self.den

    def __str__(self):
        parts = []
        for m, c in sorted(self.coords().items(), key=lambda t: (abs(t[0]), t[0] < 0)):
            term = str(c) if m == 1 else (f"sqrt({m})" if c == 1 else f"{c}*sqrt({m})")
            if m != 1 and c == -1:
                term = f"-sqrt({m})"
            parts.append(term)
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    __repr__ = __str__


def _inverse(x: FieldElement, level: int) -> FieldElement:
    if level == 0:
        c = Fraction(x.num[0], x.den)
        return x.field.scalar(1 / c)
    u, v = x.split(level)
    if v.is_zero():
        return _inverse(u, level - 1)
    g = x.field.gens[level - 1]
    N = u * u - v * v * g
    inv = _inverse(N, level - 1)
    root = x.field.sqrt_of(x.field.basis[1 << (level - 1)])
    return (u - v * root) * inv


def _sign_rational(x: FieldElement) -> int:
    c = x.num[0]
    return (c > 0) - (c < 0)


def _signs(x: FieldElement, level: int) -> list[int]:
    if level == 0:
        return [_sign_rational(x)]
    u, v = x.split(level)
    su = _signs(u, level - 1)
    if v.is_zero():
        return su + su
    sv = _signs(v, level - 1)
    g = x.field.gens[level - 1]
    sn = _signs(u * u - v * v * g, level - 1)
    out = []
    for flip in (1, -1):
        for a, b, n in zip(su, sv, sn):
            b *= flip
            if b == 0 or a == b:
                out.append(a)
            elif a == 0:
                out.append(b)
            else:
                out.append(a if n > 0 else b)
    return out


# --------------------------------------------------------------------------
# square roots


class SquareStatus(enum.Enum):
    SQUARE = "square"
    NOT_SQUARE = "not_square"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SquareResult:
    status: SquareStatus
    root: FieldElement | None = None

    @property
    def is_square(self) -> bool:
        return self.status is SquareStatus.SQUARE


class _Budget(Exception):
    pass


def _rational_sqrt(x: FieldElement) -> FieldElement | None:
    n, d = x.num[0], x.den
    if n < 0:
        return None
    r = is_perfect_square(n * d)
    if r is None:
        return None
    return x.field.scalar(Fraction(r, d))


def _sqrt(x: FieldElement, level: int, max_bits: int) -> FieldElement | None:
    if x.bits() > max_bits:
        raise _Budget
    if x.is_zero():
        return x
    if level == 0:
        return _rational_sqrt(x)
    fld = x.field
    g = fld.gens[level - 1]
    root_g = fld.sqrt_of(fld.basis[1 << (level - 1)])
    u, v = x.split(level)
    if v.is_zero():
        r = _sqrt(u, level - 1, max_bits)
        if r is not None:
            return r
        t = _sqrt(u / g, level - 1, max_bits)
        return None if t is None else t * root_g
    n = _sqrt(u * u - v * v * g, level - 1, max_bits)
    if n is None:
        return None
    for cand in ((u + n) / 2, (u - n) / 2):
        s = _sqrt(cand, level - 1, max_bits)
        if s is None or s.is_zero():
            continue
        r = s + v * _inverse(s, level - 1) / 2 * root_g
        if r * r == x:
            return r
    return None


def square_test(field: MultiQuadField, x: FieldElement, max_bits: int = MAX_COEFF_BITS) -> SquareResult:
    """Decide whether ``x`` is a square in ``field``; roots are verified by squaring.

    In a real field the returned root is positive under the identity embedding.
    ``UNKNOWN`` is returned only when coefficients outgrow ``max_bits``.
    """
    if x.field != field:
        x = field.lift(x)
    if x.is_zero():
        raise ValueError("square_test needs a nonzero element")
    if field.is_real and any(s < 0 for s in x.signs()):
        return SquareResult(SquareStatus.NOT_SQUARE)
    try:
        r = _sqrt(x, field.k, max_bits)
    except _Budget:
        return SquareResult(SquareStatus.UNKNOWN)
    if r is None:
        return SquareResult(SquareStatus.NOT_SQUARE)
    if r * r != x:
        raise AssertionError("square root failed exact verification")
    if field.is_real and r.signs()[0] < 0:
        r = -r
    return SquareResult(SquareStatus.SQUARE, r)


# --------------------------------------------------------------------------
# units as formal symbols


@dataclass(frozen=True)
class UnitSymbol:
    """Formal product ``sign * prod eps_d^e`` with dyadic rational exponents.

    Fractional powers denote the root that is positive under the identity
    embedding; the value is always carried alongside as a FieldElement.
    """

    exponents: tuple[tuple[int, Fraction], ...]
    sign: int = 1

    @classmethod
    def eps(cls, d: int) -> "UnitSymbol":
        return cls(((d, Fraction(1)),))

    def exponent_map(self) -> dict[int, Fraction]:
        return dict(self.exponents)

    def __mul__(self, other: "UnitSymbol") -> "UnitSymbol":
        acc = self.exponent_map()
        for d, e in other.exponents:
            acc[d] = acc.get(d, Fraction(0)) + e
        return UnitSymbol(tuple(sorted((d, e) for d, e in acc.items() if e)), self.sign * other.sign)

    def scale(self, q: Fraction) -> "UnitSymbol":
        return UnitSymbol(tuple((d, e * q) for d, e in self.exponents), self.sign)

    def __str__(self):
        if not self.exponents:
            return "-1" if self.sign < 0 else "1"
        dens = {e.denominator for _, e in self.exponents}
        if len(dens) == 1 and all(e.numerator == 1 for _, e in self.exponents):
            core = _nested_sqrt("*".join(f"eps{d}" for d, _ in self.exponents), dens.pop())
        else:
            core = "*".join(f"eps{d}" if e == 1 else f"eps{d}^({e})" for d, e in self.exponents)
        return ("-" if self.sign < 0 else "") + core


def _nested_sqrt(inner: str, den: int) -> str:
    out = inner
    while den > 1:
        out = f"sqrt({out})"
        den //= 2
    return out


@dataclass(frozen=True)
class Unit:
    symbol: UnitSymbol
    value: FieldElement

    def __str__(self):
        return str(self.symbol)


def subfield_units(field: MultiQuadField) -> list[Unit]:
    """Fundamental units of the real quadratic subfields, as elements of ``field``."""
    out = []
    for d in subfields(field):
        if d > 1:
            out.append(Unit(UnitSymbol.eps(d), field.pell_element(fundamental_unit(d))))
    return out


def _product(units: Sequence[Unit], subset: Sequence[int]) -> Unit:
    sym = UnitSymbol(())
    val = units[0].value.field.scalar(1)
    for j in subset:
        sym = sym * units[j].symbol
        val = val * units[j].value
    return Unit(sym, val)


def _subsets_by_weight(r: int) -> Iterable[tuple[int, ...]]:
    for w in range(1, r + 1):
        yield from combinations(range(r), w)


# --------------------------------------------------------------------------
# unit index (Wada's sieve)


@dataclass
class UnitIndexResult:
    field: MultiQuadField
    q_index: int | None
    fsu: list[Unit]
    base: list[int]
    complete: bool = True
    unknown_tests: int = 0

    def exponent_matrix(self) -> list[list[Fraction]]:
        """Rows: fsu units; columns: exponents of eps_d for d in ``base``."""
        rows = []
        for u in self.fsu:
            e = u.symbol.exponent_map()
            rows.append([e.get(d, Fraction(0)) for d in self.base])
        return rows


def determinant(rows: list[list[Fraction]]) -> Fraction:
    a = [list(r) for r in rows]
    n = len(a)
    det = Fraction(1)
    for i in range(n):
        piv = next((j for j in range(i, n) if a[j][i] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != i:
            a[i], a[piv] = a[piv], a[i]
            det = -det
        det *= a[i][i]
        for j in range(i + 1, n):
            f = a[j][i] / a[i][i]
            if f:
                a[j] = [x - f * y for x, y in zip(a[j], a[i])]
    return det


def saturate(
    field: MultiQuadField, units: list[Unit], max_bits: int = MAX_COEFF_BITS
) -> tuple[list[Unit], int, int]:
    """2-saturate ``units`` inside ``field``: replace units by square roots of
    products until no product of the basis is a square.

    Returns ``(basis, number_of_square_roots_taken, unknown_tests)``.
    """
    basis = list(units)
    neg = [u.value.negative_mask() for u in basis]
    taken = unknown = 0
    while True:
        found = False
        for subset in _subsets_by_weight(len(basis)):
            acc = 0
            for j in subset:
                acc ^= neg[j]
            if acc:
                continue
            prod = _product(basis, subset)
            res = square_test(field, prod.value, max_bits)
            if res.status is SquareStatus.UNKNOWN:
                unknown += 1
                continue
            if not res.is_square:
                continue
            j = subset[-1]
            root = Unit(prod.symbol.scale(Fraction(1, 2)), res.root)
            basis[j] = root
            neg[j] = root.value.negative_mask()
            taken += 1
            found = True
            break
        if not found:
            return basis, taken, unknown


def unit_index(
    field: MultiQuadField,
    units: list[Unit] | None = None,
    max_bits: int = MAX_COEFF_BITS,
) -> UnitIndexResult:
    """Index of the subfield-unit group in the full unit group of a real field."""
    if not field.is_real:
        raise ValueError("unit_index sieves real fields; use cm_unit_index for CM fields")
    base_units = subfield_units(field) if units is None else list(units)
    base = [d for d in subfields(field)]
    fsu, taken, unknown = saturate(field, base_units, max_bits)
    return UnitIndexResult(
        field,
        (1 << taken) if not unknown else None,
        fsu,
        base,
        complete=not unknown,
        unknown_tests=unknown,
    )


# --------------------------------------------------------------------------
# Hasse unit index


@dataclass
class HasseResult:
    field: MultiQuadField
    Q: int
    n0: int
    factor: FieldElement
    witness: Unit | None = None
    new_unit: FieldElement | None = None
    fsu_plus: list[Unit] = dc_field(default_factory=list)
    fsu: list[str] = dc_field(default_factory=list)
    notes: list[str] = dc_field(default_factory=list)


def roots_of_unity_exponent(field: MultiQuadField) -> int:
    """Largest ``n`` with a primitive ``2^n``-th root of unity in the field (1 means only -1)."""
    if not field.contains_class(-1):
        return 1
    return 3 if field.contains_class(2) else 2


def _hasse_factor(field: MultiQuadField, plus: MultiQuadField, n0: int) -> FieldElement:
    if n0 == 2:
        return plus.scalar(2)
    if n0 == 3:
        return plus.scalar(2) + plus.sqrt_of(2)
    negatives = sorted((m for m in field.basis if m < 0), key=abs)
    return plus.scalar(-negatives[0])


def hasse_index(
    field: MultiQuadField,
    n0: int | None = None,
    fsu_plus: list[Unit] | None = None,
    max_bits: int = MAX_COEFF_BITS,
) -> HasseResult:
    """Hasse unit index ``Q = [E_K : W_K E_{K+}]`` of an imaginary multiquadratic field.

    With ``i`` in K the test is whether ``(2 + mu_{n0}) * eps`` is a square in K+
    (``mu_2 = 0``, ``mu_3 = sqrt 2``).  Without ``i`` (K = K+(sqrt(-delta))) it is
    whether ``delta * eps`` is a square in K+.  ``eps`` runs over E_{K+} modulo squares.
    """
    if field.is_real:
        raise ValueError("the Hasse unit index is defined for CM fields only")
    found_n0 = roots_of_unity_exponent(field)
    if n0 is not None:
        if n0 >= 4:
            raise ValueError("n0 >= 4 cannot occur in a multiquadratic field")
    notes = []
    if n0 is not None and n0 != found_n0:
        # the field decides; a mismatched request is reported, not obeyed
        notes.append(f"requested n0={n0}; field has maximal 2-power root of unity of order 2^{found_n0}")
        log.warning(notes[-1])
    n0 = found_n0
    plus = field.real_subfield()
    if fsu_plus is None:
        fsu_plus = unit_index(plus, max_bits=max_bits).fsu
    factor = _hasse_factor(field, plus, n0)
    fneg = factor.negative_mask()
    neg = [u.value.negative_mask() for u in fsu_plus]
    result = HasseResult(field, 1, n0, factor, fsu_plus=fsu_plus, notes=notes)
    for w in range(0, len(fsu_plus) + 1):
        for subset in combinations(range(len(fsu_plus)), w):
            acc = fneg
            for j in subset:
                acc ^= neg[j]
            if acc:
                continue
            eps = _product(fsu_plus, subset) if subset else Unit(UnitSymbol(()), plus.scalar(1))
            res = square_test(plus, factor * eps.value, max_bits)
            if res.status is SquareStatus.UNKNOWN:
                raise ArithmeticError("Hasse square test indeterminate within the bit budget")
            if not res.is_square:
                continue
            eta = _hasse_unit(field, n0, factor, eps.value, res.root)
            result.Q = 2
            result.witness = eps
            result.new_unit = eta
            keep = [str(u) for j, u in enumerate(fsu_plus) if not subset or j != subset[-1]]
            result.fsu = keep + [_hasse_label(n0, eps)]
            return result
    result.fsu = [str(u) for u in fsu_plus]
    return result


def _hasse_label(n0: int, eps: Unit) -> str:
    xi = {1: "-1", 2: "i", 3: "zeta8"}[n0]
    return f"sqrt({xi}*{eps})"


def _hasse_unit(field, n0, factor, eps, rho) -> FieldElement:
    """The unit sqrt(xi * eps) of K built from rho^2 = factor * eps, checked exactly."""
    eps_k, rho_k, fac_k = field.lift(eps), field.lift(rho), field.lift(factor)
    if n0 == 1:
        delta = fac_k
        eta = rho_k * field.sqrt_of(-int(delta.num[0] // delta.den)) / (-delta)
        xi = field.scalar(-1)
    else:
        if n0 == 2:
            xi = field.sqrt_of(-1)
        else:
            xi = (field.sqrt_of(2) + field.sqrt_of(-2)) / 2
        # xi * (2 + mu) = (1 + xi)^2
        eta = (xi + 1) * rho_k / fac_k
    if eta * eta != xi * eps_k:
        raise AssertionError("Hasse unit failed exact verification")
    return eta


# --------------------------------------------------------------------------
# roots-of-unity bookkeeping and CM unit index


def roots_of_unity_index(field: MultiQuadField) -> int:
    """``[W_K : prod W_{k_i}]``: 2 exactly when zeta_8 lies in K, else 1."""
    return 2 if roots_of_unity_exponent(field) == 3 else 1


def cm_unit_index(field: MultiQuadField, max_bits: int = MAX_COEFF_BITS) -> tuple[int, HasseResult, UnitIndexResult]:
    """``q(K) = Q_K * [W_K : prod W_{k_i}] * q(K+)`` for an imaginary multiquadratic K."""
    plus = field.real_subfield()
    ui = unit_index(plus, max_bits=max_bits)
    if ui.q_index is None:
        raise ArithmeticError("unit index of the real subfield is indeterminate")
    hs = hasse_index(field, fsu_plus=ui.fsu, max_bits=max_bits)
    return hs.Q * roots_of_unity_index(field) * ui.q_index, hs, ui


# --------------------------------------------------------------------------
# explicit unit decompositions

CASES = ("q", "2q", "q1q2", "2q1q2")


@dataclass(frozen=True)
class Decomposition:
    case: str
    q1: int
    q2: int | None
    d: int
    unit: PellSolution
    witnesses: tuple[tuple[str, int], ...]
    identities: tuple[tuple[str, int, int], ...]

    def witness(self, name: str) -> int:
        return dict(self.witnesses)[name]

    def verified(self) -> bool:
        return all(lhs == rhs for _, lhs, rhs in self.identities)

    def sqrt_unit(self, field: MultiQuadField) -> FieldElement:
        """sqrt(eps_d) as an element of ``field``, positive under the identity embedding."""
        w = dict(self.witnesses)
        if self.case == "q1q2":
            return field.element({self.q1: w["b1"], self.q2: w["b2"]})
        A, B = {"q": ("beta1", "beta2"), "2q": ("d1", "d2"), "2q1q2": ("y1", "y2")}[self.case]
        # sqrt(2 eps) = A + B sqrt(d), so sqrt(eps) = (A sqrt 2 + B sqrt(2d)) / 2
        half_root = field.element({1: w[A], self.d: w[B]}) * field.sqrt_of(2) / 2
        return half_root


def _check_q(q: int, label: str) -> None:
    if not is_prime(q) or q % 8 != 3:
        raise HypothesisError(f"{label}={q} must be a prime = 3 (mod 8)")


def decompose_unit(case: str, q1: int, q2: int | None = None) -> Decomposition:
    """Witness integers expressing sqrt(eps) or sqrt(2 eps) for the four unit families."""
    if case not in CASES:
        raise ValueError(f"case must be one of {CASES}")
    _check_q(q1, "q1")
    if case in ("q1q2", "2q1q2"):
        if q2 is None:
            raise HypothesisError(f"case {case} needs q2")
        _check_q(q2, "q2")
        if q1 == q2:
            raise HypothesisError("q1 and q2 must differ")
        if jacobi(q1, q2) != 1:
            raise HypothesisError(f"({q1}/{q2}) = -1; swap the pair")
    d = {"q": q1, "2q": 2 * q1, "q1q2": q1 * (q2 or 1), "2q1q2": 2 * q1 * (q2 or 1)}[case]
    u = fundamental_unit(d)
    if u.denom != 1:
        raise IdentityFailure(f"eps_{d} = {u} is not integral")
    x, y = u.x_num, u.y_num
    ids: list[tuple[str, int, int]] = [("norm = 1", u.norm, 1)]

    def root(n: int, label: str) -> int:
        r = is_perfect_square(n) if n >= 0 else None
        if r is None:
            raise IdentityFailure(f"{label} = {n} is not a square for d={d}")
        return r

    if case == "2q1q2":
        D = 2 * q1 * q2
        if (x + 1) % D:
            raise IdentityFailure(f"{D} does not divide x+1 for eps_{d}")
        y1, y2 = root(x - 1, "x-1"), root((x + 1) // D, "(x+1)/2q1q2")
        wit = (("x", x), ("y", y), ("y1", y1), ("y2", y2))
        ids += [
            ("x - 1 = y1^2", x - 1, y1 * y1),
            ("x + 1 = 2q1q2 y2^2", x + 1, D * y2 * y2),
            ("2 = -y1^2 + 2q1q2 y2^2", 2, -y1 * y1 + D * y2 * y2),
            ("y = y1 y2", y, y1 * y2),
        ]
    elif case == "q1q2":
        a, b = x, y
        if (a + 1) % (2 * q1) or (a - 1) % (2 * q2):
            raise IdentityFailure(f"a+-1 not divisible as expected for eps_{d}")
        b1, b2 = root((a + 1) // (2 * q1), "(a+1)/2q1"), root((a - 1) // (2 * q2), "(a-1)/2q2")
        wit = (("a", a), ("b", b), ("b1", b1), ("b2", b2))
        ids += [
            ("a + 1 = 2q1 b1^2", a + 1, 2 * q1 * b1 * b1),
            ("a - 1 = 2q2 b2^2", a - 1, 2 * q2 * b2 * b2),
            ("1 = q1 b1^2 - q2 b2^2", 1, q1 * b1 * b1 - q2 * b2 * b2),
            ("b = 2 b1 b2", b, 2 * b1 * b2),
        ]
    elif case == "2q":
        D = 2 * q1
        if (x + 1) % D:
            raise IdentityFailure(f"{D} does not divide c+1 for eps_{d}")
        d1, d2 = root(x - 1, "c-1"), root((x + 1) // D, "(c+1)/2q")
        wit = (("c", x), ("d", y), ("d1", d1), ("d2", d2))
        ids += [
            ("c - 1 = d1^2", x - 1, d1 * d1),
            ("c + 1 = 2q d2^2", x + 1, D * d2 * d2),
            ("2 = -d1^2 + 2q d2^2", 2, -d1 * d1 + D * d2 * d2),
            ("d = d1 d2", y, d1 * d2),
        ]
    else:
        if (x + 1) % q1:
            raise IdentityFailure(f"{q1} does not divide alpha+1 for eps_{d}")
        b1, b2 = root(x - 1, "alpha-1"), root((x + 1) // q1, "(alpha+1)/q")
        wit = (("alpha", x), ("beta", y), ("beta1", b1), ("beta2", b2))
        ids += [
            ("alpha - 1 = beta1^2", x - 1, b1 * b1),
            ("alpha + 1 = q beta2^2", x + 1, q1 * b2 * b2),
            ("2 = -beta1^2 + q beta2^2", 2, -b1 * b1 + q1 * b2 * b2),
            ("beta = beta1 beta2", y, b1 * b2),
        ]
    dec = Decomposition(case, q1, q2, d, u, wit, tuple(ids))
    for label, lhs, rhs in dec.identities:
        if lhs != rhs:
            raise IdentityFailure(f"{label} fails for d={d}: {lhs} != {rhs}")
    return dec


def orient(q1: int, q2: int) -> tuple[int, int]:
    """Order a pair so that (q1/q2) = 1 (possible for distinct q1, q2 = 3 mod 4)."""
    return (q1, q2) if jacobi(q1, q2) == 1 else (q2, q1)


# --------------------------------------------------------------------------
# the triquadratic field Q(sqrt 2, sqrt q1, sqrt q2)


def triquadratic_roots(q1: int, q2: int) -> tuple[MultiQuadField, dict[str, FieldElement]]:
    """Square roots of the subfield units of L = Q(sqrt2, sqrt q1, sqrt q2) given by the
    decompositions, keyed ``"q1"``, ``"2q1"``, ``"q2"``, ``"2q2"``, ``"q1q2"``, ``"2q1q2"``."""
    a, b = orient(q1, q2)
    L = MultiQuadField([2, q1, q2])
    roots = {
        "q1": decompose_unit("q", q1).sqrt_unit(L),
        "2q1": decompose_unit("2q", q1).sqrt_unit(L),
        "q2": decompose_unit("q", q2).sqrt_unit(L),
        "2q2": decompose_unit("2q", q2).sqrt_unit(L),
        "q1q2": decompose_unit("q1q2", a, b).sqrt_unit(L),
        "2q1q2": decompose_unit("2q1q2", a, b).sqrt_unit(L),
    }
    return L, roots


XI_RELATIONS = {
    "xi1": ("q1", "q2", "2q1q2"),
    "xi2": ("2q1", "2q2", "2q1q2"),
    "xi3": ("q1", "2q1", "q2", "2q2"),
}


def proposition_relations(q1: int, q2: int, max_bits: int = MAX_COEFF_BITS) -> dict[str, SquareResult]:
    """Square tests of the three products of square roots of units in L."""
    L, roots = triquadratic_roots(q1, q2)
    out = {}
    for name, keys in XI_RELATIONS.items():
        prod = L.scalar(1)
        for k in keys:
            prod = prod * roots[k]
        out[name] = square_test(L, prod, max_bits)
    return out
