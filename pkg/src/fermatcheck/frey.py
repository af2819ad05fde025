"""Frey curves y^2 = x(x - s)(x + t) and their valuation bookkeeping at L.

Throughout, s = a^p and t = b^p, so c^p = -(s + t).  Only valuations at the
prime L above 2 and reductions at odd primes are computed; Tate's algorithm
is not.  Neron types that appear in reports are literature annotations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra.finite_field import FiniteField, count_points_legendre
from .errors import ConfigurationError, DomainError
from .numberfield import (
    FieldElement,
    NumberField,
    PrimeIdealData,
    dedekind_factor,
    reduce_mod_prime,
    v_L,
    vp_rational,
)
from .units import find_normalizing_unit, theorem17_check

Scalar = int | Fraction


def _el(K: NumberField, x) -> FieldElement:
    return x if isinstance(x, FieldElement) else K(x)


def curve_invariants(s: FieldElement, t: FieldElement) -> tuple[FieldElement, FieldElement, FieldElement]:
    """(c4, c6, Delta) of y^2 = x(x - s)(x + t)."""
    u = -(s + t)
    c4 = 16 * (s * s + s * t + t * t)
    c6 = -32 * (s - t) * (t - u) * (u - s)
    disc = 16 * (s * t * u) ** 2
    return c4, c6, disc


def c6_factored(s, t):
    """Second expression for c6, used as an independent check."""
    return 32 * (s - t) * (2 * s + t) * (s + 2 * t)


@dataclass
class FreyInvariants:
    field: NumberField = field(repr=False)
    a: FieldElement | None
    b: FieldElement | None
    c: FieldElement | None
    p: int
    s: FieldElement
    t: FieldElement
    c4: FieldElement
    c6: FieldElement
    disc: FieldElement
    v_c4: int | None = None
    v_c6: int | None = None
    v_disc: int | None = None

    def identity_holds(self) -> bool:
        return self.c4**3 - self.c6**2 == 1728 * self.disc

    def valuations(self) -> tuple[int | None, int | None, int | None]:
        return (self.v_c4, self.v_c6, self.v_disc)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "c4": [str(c) for c in self.c4.coords],
            "c6": [str(c) for c in self.c6.coords],
            "Delta": [str(c) for c in self.disc.coords],
            "v_L": {"c4": self.v_c4, "c6": self.v_c6, "Delta": self.v_disc},
        }


def _maybe_v(K: NumberField, x: FieldElement) -> int | None:
    if not K.two_totally_ramified or x.is_zero():
        return None
    return v_L(K, x)


def frey_from_powers(K: NumberField, s, t, p: int = 0) -> FreyInvariants:
    """Invariants from formal parameters s = a^p, t = b^p."""
    s, t = _el(K, s), _el(K, t)
    if s.is_zero() or t.is_zero() or (s + t).is_zero():
        raise DomainError("degenerate Frey curve: abc = 0")
    c4, c6, disc = curve_invariants(s, t)
    if c6 != c6_factored(s, t):
        raise ArithmeticError("c6 expressions disagree")
    inv = FreyInvariants(K, None, None, None, p, s, t, c4, c6, disc, _maybe_v(K, c4), _maybe_v(K, c6), _maybe_v(K, disc))
    if not inv.identity_holds():
        raise ArithmeticError("c4^3 - c6^2 != 1728 Delta")
    return inv


def _check_coprime(K: NumberField, a: FieldElement, b: FieldElement, c: FieldElement):
    """Certify aO + bO + cO = O or find a common prime; DomainError when not coprime."""
    na, nb, nc = (abs(x.norm()) for x in (a, b, c))
    g = math.gcd(math.gcd(int(na), int(nb)), int(nc))
    if g == 1:
        return
    from sympy import factorint

    for ell in factorint(g):
        if ell == 2 and K.two_totally_ramified:
            # L is the only prime above 2 and everything in g is divisible by it
            if all(v_L(K, x) > 0 for x in (a, b, c)):
                raise DomainError("a, b, c share the prime above 2")
            continue
        if K.index % ell == 0:
            raise ConfigurationError(f"cannot certify coprimality at {ell}, which divides the index")
        for q in dedekind_factor(K, ell):
            if all(reduce_mod_prime(x, q) == 0 for x in (a, b, c)):
                raise DomainError(f"a, b, c share a prime above {ell}")


def frey_invariants(K: NumberField, a, b, c, p: int) -> FreyInvariants:
    """Invariants of y^2 = x(x - a^p)(x + b^p) for a genuine triple."""
    a, b, c = (_el(K, x) for x in (a, b, c))
    if any(x.is_zero() for x in (a, b, c)):
        raise DomainError("degenerate Frey curve: abc = 0")
    if not all(x.is_integral() for x in (a, b, c)):
        raise DomainError("a, b, c must be integral")
    s, t, u = a**p, b**p, c**p
    if not (s + t + u).is_zero():
        raise DomainError("a^p + b^p + c^p != 0")
    _check_coprime(K, a, b, c)
    inv = frey_from_powers(K, s, t, p)
    inv.a, inv.b, inv.c = a, b, c
    return inv


# ---------------------------------------------------------------------------
# normalisation at L


@dataclass
class ModelScaling:
    scale: str
    triple: tuple[int, int, int]

    def integral_claim_ok(self) -> bool:
        return all(v >= 0 for v in self.triple)


@dataclass
class NormalizationReport:
    permutation: tuple[str, str, str]
    epsilon: FieldElement
    a: FieldElement
    b: FieldElement
    v_abc: int
    w_integral: bool
    v_c4_W: int
    v_disc_W: int
    expected_v_disc: int

    @property
    def multiplicative(self) -> bool:
        return self.w_integral and self.v_c4_W == 0 and self.v_disc_W > 0

    @property
    def formula_holds(self) -> bool:
        return self.v_disc_W == self.expected_v_disc

    def to_json(self) -> dict:
        return {
            "permutation": list(self.permutation),
            "epsilon": [str(c) for c in self.epsilon.coords],
            "v_L(abc)": self.v_abc,
            "W_model_integral": self.w_integral,
            "v_L(c4(W))": self.v_c4_W,
            "v_L(Delta(W))": self.v_disc_W,
            "2p*v_L(abc)-8d": self.expected_v_disc,
            "multiplicative_at_L": self.multiplicative,
        }


def normalize_solution(K: NumberField, a, b, c, p: int, *, ray_class_checked: bool = False) -> NormalizationReport:
    """Permute so that L | b, scale by a unit with eps*a = -1 mod 4, and check the (W) model.

    ``c`` may be None for formal inputs; then c^p is taken to be -(a^p + b^p)
    and must be prime to L.
    """
    d = K.d
    if p <= 4 * d:
        raise DomainError(f"need p > 4d = {4 * d}, got p = {p}")
    if not K.two_totally_ramified:
        raise ConfigurationError("2 is not totally ramified")
    if not ray_class_checked and not theorem17_check(K).ray_class_field_trivial:
        raise ConfigurationError("K differs from its ray class field modulo 4")
    a, b = _el(K, a), _el(K, b)
    names = ["a", "b", "c"]
    if c is None:
        cp = -(a**p + b**p)
        if cp.is_zero():
            raise DomainError("abc = 0")
        vals = [v_L(K, a), v_L(K, b)]
        vc = v_L(K, cp)
        if vc != 0:
            raise DomainError("formal c^p must be prime to L")
        elems = [a, b]
    else:
        c = _el(K, c)
        vals = [v_L(K, x) for x in (a, b, c)]
        elems = [a, b, c]
    divisible = [i for i, v in enumerate(vals) if v > 0]
    if len(divisible) != 1:
        raise DomainError(f"exactly one of a, b, c must be divisible by L (valuations {vals})")
    i = divisible[0]
    if i == 0:
        order = [1, 0, 2]
    elif i == 2:
        order = [0, 2, 1]
    else:
        order = [0, 1, 2]
    if c is None and i != 1 and i != 0:
        raise DomainError("formal input needs L | a or L | b")
    perm = tuple(names[j] for j in order)
    if c is None:
        a2, b2 = (elems[1], elems[0]) if i == 0 else (elems[0], elems[1])
    else:
        a2, b2 = elems[order[0]], elems[order[1]]
    eps = find_normalizing_unit(K, a2)
    a3, b3 = eps * a2, eps * b2
    s, t = a3**p, b3**p
    # (W): Y^2 + XY = X^3 + ((t - s - 1)/4) X^2 - (st/16) X
    a2W = (t - s - 1) * Fraction(1, 4)
    a4W = -(s * t) * Fraction(1, 16)
    integral = a2W.is_integral() and a4W.is_integral()
    c4, _, disc = curve_invariants(s, t)
    c4W = c4 * Fraction(1, 16)
    dW = disc * Fraction(1, 4096)
    v_abc = v_L(K, b3)
    return NormalizationReport(perm, eps, a3, b3, v_abc, integral, v_L(K, c4W), v_L(K, dW), 2 * p * v_abc - 8 * d)


# ---------------------------------------------------------------------------
# the p = 13 chain over a quartic field


NERON_ANNOTATIONS = {
    (8, 12, 18): "I6* (conductor exponent 8) or non-minimal",
    (4, 6, 6): "II (conductor exponent 6) or III (conductor exponent 5)",
}


def uniformizer(K: NumberField) -> FieldElement:
    """An integral element with v_L = 1."""
    K.require_two_totally_ramified()
    cands = [K.alpha] + [FieldElement(K, [int(i == j) for j in range(K.d)]) for i in range(K.d)]
    cands += [K.alpha - 1, K.alpha + 1]
    for x in cands:
        if not x.is_zero() and v_L(K, x) == 1:
            return x
    for x in cands:
        for y in cands:
            z = x + y
            if not z.is_zero() and v_L(K, z) == 1:
                return z
    raise ConfigurationError("no uniformiser found among small elements")


@dataclass
class Lemma14Report:
    initial: tuple[int, int, int]
    scaled: tuple[int, int, int]
    possibly_reduced: tuple[int, int, int]
    w_integral: bool
    epsilon: FieldElement
    v_j: int
    annotations: dict

    def to_json(self) -> dict:
        return {
            "v_L(c4,c6,Delta)": list(self.initial),
            "after_pi4_scaling": list(self.scaled),
            "if_not_minimal": list(self.possibly_reduced),
            "W_model_integral": self.w_integral,
            "v_L(j)": self.v_j,
            "annotations": self.annotations,
            "conductor_exponents": [5, 6, 8],
        }


def lemma14_chain(K: NumberField, a, b, p: int = 13, c=None) -> Lemma14Report:
    """Valuation chain for p <= 4d when v_L(abc) = 1 on a quartic field."""
    if K.d != 4:
        raise DomainError("the chain is stated for quartic fields")
    a, b = _el(K, a), _el(K, b)
    if c is None:
        cp = -(a**p + b**p)
        vc = v_L(K, cp)
        if vc % p:
            raise DomainError("v_L(c^p) is not a multiple of p")
        vc //= p
    else:
        c = _el(K, c)
        vc = v_L(K, c)
    v_abc = v_L(K, a) + v_L(K, b) + vc
    if v_abc >= 2:
        raise DomainError("v_L(abc) >= 2: normalise as in the semistable case instead")
    if v_abc != 1:
        raise DomainError(f"need v_L(abc) = 1, got {v_abc}")
    if vc == 1:
        raise DomainError("put the L-divisible entry in position b")
    if v_L(K, a) == 1:
        a, b = b, a
    eps = find_normalizing_unit(K, a)
    a, b = eps * a, eps * b
    s, t = a**p, b**p
    if not ((s + 1) * Fraction(1, 4)).is_integral():
        raise DomainError("a^p + 1 is not divisible by 4 after scaling")
    inv = frey_from_powers(K, s, t, p)
    initial = (inv.v_c4, inv.v_c6, inv.v_disc)
    pi = uniformizer(K)
    scaled = (initial[0] - 8, initial[1] - 12, initial[2] - 24)
    # (W): x = pi^4 X, y = pi^6 Y + pi^4 X
    pi2, pi4 = pi**2, pi**4
    a1 = 2 * pi2.inverse()
    a2W = (t - s - 1) * pi4.inverse()
    a4W = -(s * t) * (pi4 * pi4).inverse()
    integral = a1.is_integral() and a2W.is_integral() and a4W.is_integral()
    reduced = (scaled[0] - 4, scaled[1] - 6, scaled[2] - 12)
    v_j = 3 * initial[0] - initial[2]
    return Lemma14Report(initial, scaled, reduced, integral, eps, v_j, dict(
        (str(list(k)), v) for k, v in NERON_ANNOTATIONS.items()
    ))


# ---------------------------------------------------------------------------
# j-invariants


def j_valuation_from_lambda(K: NumberField, lam) -> int:
    """v_L(j) for y^2 = x(x - 1)(x - lambda), j = 2^8 (1 - lm)^3 / (lm)^2 with m = 1 - lambda."""
    lam = _el(K, lam)
    if lam.is_zero() or (lam - 1).is_zero():
        raise DomainError("lambda must differ from 0 and 1")
    mu = 1 - lam
    lm = lam * mu
    one_minus = 1 - lm
    return 8 * K.d + 3 * v_L(K, one_minus) - 2 * v_L(K, lm)


def j_valuation_closed_form(K: NumberField, lam) -> int:
    """8d - 2t with t = max(|v(lambda)|, |v(mu)|)."""
    lam = _el(K, lam)
    t = max(abs(v_L(K, lam)), abs(v_L(K, 1 - lam)))
    return 8 * K.d - 2 * t


def j_valuation_from_invariants(inv: FreyInvariants) -> int:
    if inv.v_c4 is None or inv.v_disc is None:
        raise ConfigurationError("valuations at L are unavailable")
    return 3 * inv.v_c4 - inv.v_disc


def j_valuation_rational(K: NumberField, j: Scalar) -> int:
    """v_L of a rational number: d times its 2-adic valuation."""
    K.require_two_totally_ramified()
    if Fraction(j) == 0:
        raise DomainError("j = 0")
    return K.d * vp_rational(j, 2)


def frey_j_valuation_formula(d: int, p: int, v_abc: int) -> int:
    """8d - 2p v(abc) when exactly one of a, b, c is divisible by L."""
    return 8 * d - 2 * p * v_abc


# ---------------------------------------------------------------------------
# (FS) witnesses


@dataclass
class FsWitness:
    a: FieldElement
    in_S: bool
    norm_a: Scalar
    norm_b: Scalar
    v_a: int | None
    threshold: int
    curve_param: FieldElement | None = None
    v_c4_W: int | None = None
    v_disc_W: int | None = None
    w_integral: bool | None = None

    @property
    def violates_fs(self) -> bool:
        return self.in_S and self.v_a is not None and abs(self.v_a) > self.threshold

    @property
    def verdict(self) -> str:
        if not self.in_S:
            return "not a witness: a is not in S"
        if self.violates_fs:
            return "(FS) fails: |v_L(a)| exceeds 4d"
        return "(FS) holds for this element"

    def to_json(self) -> dict:
        return {
            "a": [str(c) for c in self.a.coords],
            "in_S": self.in_S,
            "Norm(a)": str(self.norm_a),
            "Norm(1-a)": str(self.norm_b),
            "v_L(a)": self.v_a,
            "4d": self.threshold,
            "verdict": self.verdict,
            "W_model": None
            if self.v_c4_W is None
            else {"integral": self.w_integral, "v_L(c4(W))": self.v_c4_W, "v_L(Delta(W))": self.v_disc_W},
        }


def _is_signed_power_of_two(x: Scalar) -> bool:
    x = Fraction(x)
    if x == 0:
        return False
    n, dd = abs(x.numerator), x.denominator
    return n & (n - 1) == 0 and dd & (dd - 1) == 0


def is_L_unit(K: NumberField, x: FieldElement) -> bool:
    """x is supported only at L: 2-power denominator and norm +-2^k."""
    if x.is_zero():
        return False
    den = x.denominator
    if den & (den - 1):
        return False
    return _is_signed_power_of_two(x.norm())


def fs_witness_check(K: NumberField, a) -> FsWitness:
    a = _el(K, a)
    if a.is_zero() or (a - 1).is_zero():
        raise DomainError("a must differ from 0 and 1")
    K.require_two_totally_ramified()
    b = 1 - a
    na, nb = a.norm(), b.norm()
    in_S = is_L_unit(K, a) and is_L_unit(K, b)
    w = FsWitness(a, in_S, na, nb, v_L(K, a), 4 * K.d)
    if not w.violates_fs:
        return w
    a1 = a if w.v_a > 0 else a.inverse()
    b1 = 1 - a1
    # (W): Y^2 + XY = X^3 - (a/2) X^2 - (ab/16) X
    a2W = -a1 * Fraction(1, 2)
    a4W = -(a1 * b1) * Fraction(1, 16)
    c4, _, disc = curve_invariants(a1, b1)
    w.curve_param = a1
    w.w_integral = a2W.is_integral() and a4W.is_integral()
    w.v_c4_W = v_L(K, c4 * Fraction(1, 16))
    w.v_disc_W = v_L(K, disc * Fraction(1, 4096))
    return w


# ---------------------------------------------------------------------------
# reductions at odd primes


class BadReductionError(DomainError):
    """The Legendre curve is singular modulo q; use a_q = +-(Norm(q) + 1)."""

    def __init__(self, norm: int):
        super().__init__(f"bad reduction: use the multiplicative branch a_q = +-{norm + 1}")
        self.candidates = (-(norm + 1), norm + 1)


def _residue(x, q: PrimeIdealData) -> int:
    if isinstance(x, FieldElement):
        return reduce_mod_prime(x, q)
    x = Fraction(x)
    if x.denominator % q.p == 0:
        raise DomainError("value not integral at q")
    return (x.numerator * pow(x.denominator, -1, q.p)) % q.p


def aq_of_curve(s, t, q: PrimeIdealData) -> int:
    """a_q = Norm(q) + 1 - #E(F_q) for y^2 = x(x - s)(x + t) at an odd prime q."""
    if q.p == 2:
        raise DomainError("q must not lie above 2")
    F = q.residue_field
    rs, rt = _residue(s, q), _residue(t, q)
    if rs == 0 or rt == 0 or F.add(rs, rt) == 0:
        raise BadReductionError(q.norm)
    a = q.norm + 1 - count_points_legendre(rs, rt, F)
    if a * a > 4 * q.norm or (a - q.norm - 1) % 4:
        raise ArithmeticError("trace violates the Hasse bound or the 2-torsion congruence")
    return a


def power_residues(F: FiniteField, p: int) -> list[int]:
    return sorted({F.pow(x, p) for x in range(1, F.order)})


def power_residue_pairs(q: PrimeIdealData, p: int) -> tuple[list[int], list[tuple[int, int]]]:
    """p-th power residues mod q and ordered pairs (s, t) with s, t, -(s + t) all among them."""
    F = q.residue_field
    res = power_residues(F, p)
    rset = set(res)
    pairs = []
    for s in res:
        for t in res:
            u = F.neg(F.add(s, t))
            if u != 0 and u in rset:
                pairs.append((s, t))
    return res, pairs
