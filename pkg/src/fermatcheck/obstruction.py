"""Condition (C) scans, the sets A_q and the quantity B_{f,q}.

Hecke eigenvalues live in Q(beta) and are stored as rational coordinate
vectors over 1, beta, ..., beta^(n-1).  Nothing here computes newforms; the
records come from fixtures or from the LMFDB client.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

from sympy import factorint

from .algebra.finite_field import is_irreducible_mod_p
from .algebra.poly import Poly, resultant
from .algebra.realroots import RealInterval, RealRoots, count_real_roots, eval_interval
from .errors import DataGapError, DomainError, InconsistencyError, ParseError
from .numberfield import PrimeIdealData

Number = int | Fraction


def a_q_set(q_norm: int) -> list[int]:
    """All t with t^2 <= 4 Norm(q) and t = Norm(q) + 1 mod 4, ascending."""
    if q_norm < 3 or q_norm % 2 == 0:
        raise DomainError("Norm(q) must be an odd integer >= 3")
    bound = math.isqrt(4 * q_norm)
    return [t for t in range(-bound, bound + 1) if (t - q_norm - 1) % 4 == 0]


# ---------------------------------------------------------------------------
# Hecke fields


class HeckeField:
    """Q(beta) for a monic irreducible integer polynomial; degree 1 means Q."""

    def __init__(self, poly: Poly):
        if poly.is_zero() or poly.degree < 1:
            raise DomainError("Hecke polynomial must have positive degree")
        if not poly.is_integral() or poly.lc != 1:
            raise DomainError("Hecke polynomial must be monic with integer coefficients")
        self.poly = poly
        self.degree = poly.degree
        if not self._irreducible():
            raise DomainError(f"Hecke polynomial {poly} is reducible")

    @classmethod
    def rational(cls) -> "HeckeField":
        return cls(Poly([0, 1]))

    def _irreducible(self) -> bool:
        if self.degree == 1:
            return True
        coeffs = [int(c) for c in self.poly.coeffs]
        for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
            if coeffs[-1] % p and is_irreducible_mod_p([c % p for c in coeffs], p):
                return True
        from sympy import Poly as SymPoly, symbols

        x = symbols("x")
        return SymPoly(list(reversed(coeffs)), x).is_irreducible

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    @cached_property
    def totally_real(self) -> bool:
        return count_real_roots(self.poly) == self.degree

    @cached_property
    def real_roots(self) -> RealRoots:
        return RealRoots(self.poly)

    def element(self, coords: Sequence[Number | str]) -> "HeckeElement":
        c = [Fraction(x) for x in coords]
        if len(c) > self.degree:
            raise ParseError(f"eigenvalue has {len(c)} coordinates, Hecke field degree is {self.degree}")
        return HeckeElement(self, Poly(c) % self.poly if self.degree > 1 else Poly(c[:1]))

    def beta(self) -> "HeckeElement":
        if self.degree == 1:
            return self.element([-self.poly.coeffs[0]])
        return self.element([0, 1])

    def __eq__(self, other):
        return isinstance(other, HeckeField) and self.poly == other.poly

    def __hash__(self):
        return hash(self.poly)

    def __repr__(self):
        return f"HeckeField({self.poly})"


@dataclass(frozen=True)
class HeckeElement:
    field: HeckeField = field(repr=False, compare=False, hash=False)
    poly: Poly = Poly(())

    def _wrap(self, p: Poly) -> "HeckeElement":
        return HeckeElement(self.field, p % self.field.poly if self.field.degree > 1 else p)

    def _other(self, o) -> Poly:
        if isinstance(o, HeckeElement):
            return o.poly
        return Poly([Fraction(o)])

    def __add__(self, o):
        return self._wrap(self.poly + self._other(o))

    __radd__ = __add__

    def __sub__(self, o):
        return self._wrap(self.poly - self._other(o))

    def __rsub__(self, o):
        return self._wrap(self._other(o) - self.poly)

    def __neg__(self):
        return self._wrap(-self.poly)

    def __mul__(self, o):
        return self._wrap(self.poly * self._other(o))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = self._wrap(Poly([1]))
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    @property
    def coords(self) -> list[Fraction]:
        c = [Fraction(x) for x in self.poly.coeffs]
        return c + [Fraction(0)] * (self.field.degree - len(c))

    def rational_value(self) -> Fraction | None:
        if self.poly.degree <= 0:
            return Fraction(self.poly.coeffs[0]) if self.poly.coeffs else Fraction(0)
        return None

    def norm(self) -> Fraction:
        """Norm to Q as Res(m_beta, g) for g(beta) = self."""
        if self.field.degree == 1:
            g = self.poly
            return Fraction(g(-self.field.poly.coeffs[0])) if not g.is_zero() else Fraction(0)
        if self.is_zero():
            return Fraction(0)
        g = self.poly
        den = math.lcm(*[Fraction(c).denominator for c in g.coeffs])
        G = Poly([int(Fraction(c) * den) for c in g.coeffs])
        return Fraction(resultant(self.field.poly, G)) / den**self.field.degree

    def conjugates(self, bits: int = 128) -> list[RealInterval]:
        if not self.field.totally_real:
            raise DomainError("conjugate intervals need a totally real Hecke field")
        if self.field.degree == 1:
            return [RealInterval.point(self.norm())]
        return [eval_interval(self.poly, iv) for iv in self.field.real_roots.at_bits(bits)]

    def norm_by_conjugates(self) -> Fraction:
        """Independent norm: product of conjugates over certified intervals, rounded."""
        n = self.norm()
        den = math.lcm(*[Fraction(c).denominator for c in self.poly.coeffs]) if not self.is_zero() else 1
        bits = 64
        while True:
            prod = RealInterval.point(1)
            for c in self.conjugates(bits):
                prod = prod * c
            scaled = prod * (den**self.field.degree)
            if scaled.width < Fraction(1, 4):
                val = Fraction(scaled.nearest_integer(), den**self.field.degree)
                if val != n:
                    raise InconsistencyError(f"norm by resultant {n} differs from conjugate product {val}")
                return val
            bits *= 2

    def __repr__(self):
        return f"HeckeElement({self.poly})"


# ---------------------------------------------------------------------------
# newform records


PrimeKey = tuple  # (p, f, factor_index or None)


def prime_key(q) -> PrimeKey:
    if isinstance(q, PrimeIdealData):
        return (q.p, q.f, getattr(q, "index", None))
    if isinstance(q, tuple) and len(q) in (2, 3):
        return (int(q[0]), int(q[1]), q[2] if len(q) == 3 else None)
    raise DomainError(f"not a prime descriptor: {q!r}")


def _matches(key: PrimeKey, want: PrimeKey) -> bool:
    if key[:2] != want[:2]:
        return False
    return want[2] is None or key[2] is None or key[2] == want[2]


@dataclass
class NewformRecord:
    label: str
    field_label: str
    level_norm: int
    hecke_field: HeckeField | None
    eigenvalues: dict = field(default_factory=dict)
    hecke_degree: int | None = None
    orbit_size: int = 1

    def __post_init__(self):
        if self.level_norm != 2:
            raise DomainError(f"{self.label}: level must be the prime above 2 (norm 2), got {self.level_norm}")
        if self.hecke_field is not None:
            if self.hecke_degree is not None and self.hecke_degree != self.hecke_field.degree:
                raise ParseError(f"{self.label}: hecke_degree disagrees with the Hecke polynomial")
            self.hecke_degree = self.hecke_field.degree
        elif self.hecke_degree is None:
            raise ParseError(f"{self.label}: need a Hecke polynomial or a Hecke degree")
        if self.eigenvalues and self.hecke_field is None:
            raise ParseError(f"{self.label}: eigenvalues need a Hecke polynomial")

    @property
    def is_rational(self) -> bool:
        return self.hecke_degree == 1

    def q_norm(self, key: PrimeKey) -> int:
        return key[0] ** key[1]

    def a_q(self, q) -> HeckeElement:
        want = prime_key(q)
        for key, val in self.eigenvalues.items():
            if _matches(key, want):
                return val
        raise DataGapError(f"{self.label}: no eigenvalue at prime {want}")

    def weil_bound_ok(self) -> bool:
        """|sigma(a_q)| <= 2 sqrt(Norm q) in every real embedding, via intervals."""
        if self.hecke_field is None:
            return True
        if not self.hecke_field.totally_real:
            return True
        for key, a in self.eigenvalues.items():
            bound = 4 * self.q_norm(key)
            bits = 64
            for _ in range(12):
                sq = [c * c for c in a.conjugates(bits)]
                if all(s.hi <= bound for s in sq):
                    break
                if any(s.lo > bound for s in sq):
                    return False
                bits *= 2
            else:
                return False
        return True


# ---------------------------------------------------------------------------
# condition (C)


@dataclass
class FormScan:
    label: str
    rational: bool
    orbit_size: int
    status: str
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"label": self.label, "rational": self.rational, "orbit_size": self.orbit_size,
                "status": self.status, "witness": self.witness}


@dataclass
class ConditionCReport:
    forms: list[FormScan]
    verdict: str

    @property
    def count(self) -> int:
        return sum(f.orbit_size for f in self.forms)

    @property
    def rational_count(self) -> int:
        return sum(f.orbit_size for f in self.forms if f.rational)

    @property
    def satisfied(self) -> bool:
        return self.verdict.startswith("satisfied")

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "newform_count": self.count,
            "rational_count": self.rational_count,
            "forms": [f.to_json() for f in self.forms],
        }


def scan_form(form: NewformRecord) -> FormScan:
    if not form.is_rational:
        return FormScan(form.label, False, form.orbit_size, "non-rational Hecke field: not subject to (C)")
    if not form.eigenvalues:
        raise ParseError(f"{form.label}: rational form without eigenvalues")
    for key in sorted(form.eigenvalues, key=lambda k: (k[0] ** k[1], k[0], k[2] if k[2] is not None else -1)):
        a = form.eigenvalues[key].rational_value()
        if a is None or a.denominator != 1:
            raise ParseError(f"{form.label}: eigenvalue at {key} is not a rational integer")
        n = form.q_norm(key)
        if (int(a) - n - 1) % 4:
            return FormScan(form.label, True, form.orbit_size, "witness",
                            {"p": key[0], "f": key[1], "factor_index": key[2], "norm": n, "a_q": int(a)})
    return FormScan(form.label, True, form.orbit_size, "no witness among supplied eigenvalues")


def condition_c_scan(forms: Sequence[NewformRecord]) -> ConditionCReport:
    """Verdicts: 'satisfied (vacuous)', 'satisfied (witness)' or 'inconclusive up to supplied data'."""
    scans = [scan_form(f) for f in sorted(forms, key=lambda f: f.label)]
    if not scans:
        return ConditionCReport(scans, "satisfied (vacuous)")
    if all(s.status != "no witness among supplied eigenvalues" for s in scans):
        return ConditionCReport(scans, "satisfied (witness)")
    return ConditionCReport(scans, "inconclusive up to supplied data")


# ---------------------------------------------------------------------------
# B_{f,q} and survivors


def prime_divisors(n: Number) -> list[int]:
    n = Fraction(n)
    if n == 0:
        raise DomainError("prime divisors of zero")
    ps = set(factorint(abs(n.numerator))) | set(factorint(n.denominator))
    return sorted(p for p in ps if p > 1)


@dataclass
class ObstructionReport:
    label: str
    prime: PrimeKey
    q_norm: int
    a_q: list[Fraction]
    A_q: list[int]
    B: HeckeElement
    norm: Fraction
    norm_cross_checked: bool

    @property
    def survivors(self) -> list[int] | None:
        if self.norm == 0:
            return None
        return sorted(set(prime_divisors(self.norm)) | set(prime_divisors(self.q_norm)))

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "prime": {"p": self.prime[0], "f": self.prime[1], "factor_index": self.prime[2]},
            "Norm(q)": self.q_norm,
            "a_q": [str(c) for c in self.a_q],
            "A_q": self.A_q,
            "B": [str(c) for c in self.B.coords],
            "Norm(B)": str(self.norm),
            "Norm(B)_factored": None if self.norm == 0 else {str(p): e for p, e in sorted(factorint(int(abs(self.norm))).items())},
            "norm_cross_checked": self.norm_cross_checked,
            "survivors": self.survivors,
        }


def b_fq(form: NewformRecord, q) -> ObstructionReport:
    """B = N (( N + 1)^2 - a^2) prod_{t in A_q} (t - a) in Q(beta), and its norm."""
    key = prime_key(q)
    if key[0] == 2:
        raise DomainError("q must not lie above 2")
    if form.hecke_field is None:
        raise DataGapError(f"{form.label}: no Hecke polynomial, cannot evaluate B")
    a = form.a_q(key)
    n = form.q_norm(key)
    A = a_q_set(n)
    B = n * ((n + 1) ** 2 - a * a)
    for t in A:
        B = B * (t - a)
    nb = B.norm()
    checked = False
    if form.hecke_field.totally_real and not B.is_zero():
        B.norm_by_conjugates()
        checked = True
    return ObstructionReport(form.label, key, n, a.coords, A, B, nb, checked)


@dataclass
class SurvivorReport:
    label: str
    reports: list[ObstructionReport]
    survivors: list[int] | None

    @property
    def method_fails(self) -> bool:
        return self.survivors is None

    def eliminated_above(self, pmin: int, allowed: Iterable[int] = ()) -> bool:
        if self.survivors is None:
            return False
        return all(p < pmin or p in set(allowed) for p in self.survivors)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "verdict": "method fails for this form" if self.method_fails else "finite survivor set",
            "survivors": self.survivors,
            "per_prime": [r.to_json() for r in self.reports],
        }


def survivor_primes(form: NewformRecord, primes: Sequence) -> SurvivorReport:
    """Intersection over q of the prime divisors of Norm(B_{f,q}) and of Norm(q)."""
    if not primes:
        raise DomainError("need at least one prime q")
    reports = [b_fq(form, q) for q in primes]
    sets = [set(r.survivors) for r in reports if r.survivors is not None]
    if not sets:
        return SurvivorReport(form.label, reports, None)
    return SurvivorReport(form.label, reports, sorted(reduce(set.intersection, sets)))
