"""Structure predictions for the 2-class field towers of K_n = Q(zeta_{2^{n+2}}, sqrt d).

The 2-class group type (2, 2^{n+m-2}) of K_n is an input fact from the
literature and is re-emitted with that provenance; everything else here is
computed from quadratic class numbers and prime representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arith import factorize, is_prime, is_squarefree, quartic_residue_2, represent
from .iwasawa import genus_growth
from .quadratic import class_data
from .unit_lattice import HypothesisError, MultiQuadField, IdentityFailure

STRUCTURE_PROVENANCE = "cited structure theorem"
LIMIT_GROUP = "G/G' = Z/2 x Z_2"


@dataclass(frozen=True)
class TwoPrimes:
    q1: int
    q2: int


@dataclass(frozen=True)
class OnePrime:
    p: int


@dataclass(frozen=True)
class Unsupported:
    reason: str


def classify_d(d: int) -> TwoPrimes | OnePrime | Unsupported:
    if d < 2 or not is_squarefree(d):
        raise ValueError(f"d must be a squarefree integer >= 2, got {d}")
    primes = factorize(d).primes()
    if len(primes) == 2:
        q1, q2 = primes
        if q1 % 8 == 3 and q2 % 8 == 3:
            return TwoPrimes(q1, q2)
        return Unsupported("prime factors not both 3 mod 8")
    if len(primes) == 1:
        p = primes[0]
        if p % 16 != 9:
            return Unsupported("mod-16 class (need p = 9 mod 16)")
        if quartic_residue_2(p) != 1:
            return Unsupported("quartic symbol -1")
        return OnePrime(p)
    return Unsupported("d has neither one nor two prime factors")


@dataclass
class TowerPrediction:
    d: int
    case: str
    n: int
    m: int
    cl2_type: tuple[int, int]
    tower_length: tuple[int, ...]
    galois_label: str
    h2_genus: int
    h2_layer: int
    genus_cyclic: bool
    capitulation_per_quad_ext: dict[str, int]
    quad_ext_h2: int | None
    limit_group: str = LIMIT_GROUP
    provenance: str = STRUCTURE_PROVENANCE
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "d": str(self.d),
            "case": self.case,
            "n": str(self.n),
            "m": str(self.m),
            "cl2_type": [str(x) for x in self.cl2_type],
            "cl2_provenance": self.provenance,
            "tower_length": [str(x) for x in self.tower_length],
            "galois_label": self.galois_label,
            "h2_genus": str(self.h2_genus),
            "h2_layer": str(self.h2_layer),
            "genus_cyclic": self.genus_cyclic,
            "capitulation_per_quad_ext": {k: str(v) for k, v in self.capitulation_per_quad_ext.items()},
            "quad_ext_h2": None if self.quad_ext_h2 is None else str(self.quad_ext_h2),
            "limit_group": self.limit_group,
            "notes": list(self.notes),
        }


class OutOfHypothesis(ValueError):
    """m < 2: the structure theorem's type (2, 2^{n+m-2}) is not available."""


def predict(d: int, n: int) -> TowerPrediction:
    if n < 1:
        raise ValueError("layer n must be >= 1")
    kind = classify_d(d)
    if isinstance(kind, Unsupported):
        raise HypothesisError(f"d={d} unsupported: {kind.reason}")
    m = class_data(-2 * d).m
    if m < 2:
        raise OutOfHypothesis(f"h2(-{2 * d}) = 2^{m} with m < 2")
    big = 2 ** (n + m - 2)
    h2_genus = genus_growth(m, n)
    abelian = f"abelian(Z/2 x Z/{big})"
    notes = []
    if isinstance(kind, TwoPrimes):
        case = "TwoPrimes"
        length: tuple[int, ...] = (1,)
        label = abelian
        capit = {"abelian": 4}
        notes.append("capitulation count stated for d = q1*q2")
    else:
        case = "OnePrime"
        if n == 1:
            length, label, capit = (1,), abelian, {"abelian": 4}
        else:
            length, label = (1, 2), "abelian_or_modular"
            capit = {"abelian": 4, "modular": 2}
        notes.append("norm residue choice among pi', pi'' not made: selection undetermined")
    if (2, big) == (2, 4):
        notes.append("type (2, 4): biquadratic capitulation refinement is cited, not computed")
    return TowerPrediction(
        d=d,
        case=case,
        n=n,
        m=m,
        cl2_type=(2, big),
        tower_length=length,
        galois_label=label,
        h2_genus=h2_genus,
        h2_layer=2 * big,
        genus_cyclic=True,
        capitulation_per_quad_ext=capit,
        quad_ext_h2=big if "abelian" in capit else None,
        notes=notes,
    )


@dataclass(frozen=True)
class PiCandidates:
    """Conjugate pairs a +- 4b*i and e +- 4f*sqrt(2) with norm p."""

    p: int
    a: int
    b: int
    e: int
    f: int
    selection: str = "undetermined"

    @property
    def gaussian(self) -> tuple[str, str]:
        return (f"{self.a} + {4 * self.b}i", f"{self.a} - {4 * self.b}i")

    @property
    def real_quad(self) -> tuple[str, str]:
        return (f"{self.e} + {4 * self.f}*sqrt(2)", f"{self.e} - {4 * self.f}*sqrt(2)")

    def norms_ok(self) -> bool:
        gi = MultiQuadField([-1])
        r2 = MultiQuadField([2])
        pi1 = gi.element({1: self.a, -1: 4 * self.b})
        pi2 = r2.element({1: self.e, 2: 4 * self.f})
        return (
            pi1 * pi1.complex_conjugate() == self.p
            and pi2 * pi2.conjugate(1) == self.p
            and self.a**2 + 16 * self.b**2 == self.p
            and self.e**2 - 32 * self.f**2 == self.p
        )

    def congruence_ok(self) -> bool:
        """pi = xi^2 (mod 4) is solvable: a and e odd, hence = +-1 = i^2 or 1 (mod 4)."""
        return self.a % 2 == 1 and self.e % 2 == 1 and self.a % 4 in (1, 3) and self.e % 4 in (1, 3)

    def xi(self) -> dict[str, str]:
        # pi = a + 4bi = a (mod 4); a = 1 -> xi = 1, a = -1 -> xi = i
        return {
            "gaussian": "1" if self.a % 4 == 1 else "i",
            "real_quad": "1" if self.e % 4 == 1 else "i",
        }

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "gaussian": list(self.gaussian),
            "real_quad": list(self.real_quad),
            "a": str(self.a), "b": str(self.b), "e": str(self.e), "f": str(self.f),
            "mod4_square": self.congruence_ok(),
            "xi": self.xi(),
            "selection": self.selection,
        }


def pi_candidates(p: int) -> PiCandidates:
    if not is_prime(p) or p % 16 != 9:
        raise HypothesisError(f"{p} is not a prime = 9 (mod 16)")
    if quartic_residue_2(p) != 1:
        raise HypothesisError(f"(2/{p})_4 = -1")
    gauss = represent(p, 1, 16)
    real = represent(p, 1, -32)
    if not gauss or not real:
        raise IdentityFailure(f"no representation of {p} by x^2+16y^2 or x^2-32y^2")
    g, r = gauss[0], real[0]
    out = PiCandidates(p, g.a, g.b, r.a, r.b)
    if not (out.norms_ok() and out.congruence_ok()):
        raise IdentityFailure(f"pi candidates for {p} fail their checks")
    return out
