"""Totally positive units, the H_n tower, sign maps and ray class numbers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from .algebra.poly import BiPoly, Poly, resultant, resultant_in_x
from .algebra.realroots import DyadicInterval, RealRoots
from .errors import ConfigurationError, DomainError, InconsistencyError
from .numberfield import (
    FieldElement,
    NumberField,
    PrimeIdealData,
    QuotientRingMod4,
    _f2_rank,
    charpoly,
    reduce_mod_prime,
)

EXACT_DEGREE_LIMIT = 200
CROSS_CHECK_DEGREE = 81
CLOSURE_CAP = 10**6


@dataclass(frozen=True)
class UnitCertificate:
    """A unit u with H its characteristic polynomial over Q (degree d).

    When u generates K this is its minimal polynomial.  When u lies in a
    proper subfield H is a power of the minimal polynomial, which keeps the
    tower degrees equal to d^n.
    """

    unit: FieldElement
    H: Poly
    totally_positive: bool

    @property
    def t(self) -> int:
        return self.H.degree

    @classmethod
    def of(cls, K: NumberField, u: FieldElement) -> "UnitCertificate":
        if not u.is_integral() or abs(u.norm()) != 1:
            raise DomainError("not a unit of O_K")
        H = charpoly(u.multiplication_matrix())
        return cls(u, H, K.is_totally_positive(u))

    @property
    def minimal_polynomial(self) -> Poly:
        return self.unit.minimal_polynomial()

    def to_json(self) -> dict:
        return {
            "unit": [str(c) for c in self.unit.coords],
            "H": [str(c) for c in self.H.coeffs],
            "t": self.t,
            "totally_positive": self.totally_positive,
        }


# ---------------------------------------------------------------------------
# H_n(1)


def tower_poly(H: Poly, n: int) -> Poly:
    """H_n by repeated resultants H_n = Res_X(H_{n-1}(X), X^t H(Y/X))."""
    G = BiPoly.homogenize(H)
    Hn = H
    for _ in range(n - 1):
        Hn = resultant_in_x(Hn, G)
    return Hn


def tower_value_by_resultant(H_prev: Poly, H: Poly) -> int:
    """H_n(1) = Res(H_{n-1}, X^t H(1/X)) as a single univariate resultant."""
    return int(resultant(H_prev, H.reversed()))


def _root_dyadics(roots: RealRoots, prec: int, extra: int, mult: int = 1) -> list[DyadicInterval]:
    ivs = roots.at_bits(prec + extra)
    return [DyadicInterval.from_interval(iv, prec) for iv in ivs] * mult


def _multiplicity(H: Poly, m: Poly) -> int:
    """k with H = c * m^k, for m the squarefree part of H."""
    k, rest = 0, H
    while rest.degree > 0:
        q, r = divmod(rest, m)
        if not r.is_zero():
            raise DomainError("H is not a power of its squarefree part")
        rest, k = q, k + 1
    return k


def tower_value_by_intervals(H: Poly, n: int, start_prec: int | None = None, max_prec: int = 1 << 21) -> int:
    """Certified product of (1 - u_{i1} ... u_{in}) over all ordered n-tuples."""
    roots = RealRoots(H)
    mult = _multiplicity(H, roots.poly)
    if len(roots) * mult != H.degree:
        raise DomainError("H must be a power of a polynomial with only real roots")
    approx = [float(iv.mid) for iv in roots.at_bits(60)] * mult
    # float estimate of log2 |H_n(1)| to size the working precision
    prods = [0.0]
    logs = [math.log2(abs(r)) if r else -1e9 for r in approx]
    for _ in range(n):
        prods = [a + b for a in prods for b in logs]
    est = 0.0
    for lg in prods:
        if lg >= 1000:
            est += lg
            continue
        term = abs(1 - 2.0**lg)
        # factors that may vanish contribute nothing to the size estimate
        if term > 1e-9:
            est += math.log2(term)
    count = H.degree**n
    bound = max(abs(int(max(logs))) + 2, 2)
    prec = start_prec or int(max(est, 0)) + 64 + 4 * count.bit_length()
    while prec <= max_prec:
        rs = _root_dyadics(roots, prec, bound * n + 8, mult)
        level = rs
        for _ in range(n - 1):
            level = [x * r for x in level for r in rs]
        acc = DyadicInterval.from_int(1, prec)
        for y in level:
            acc = acc * y.one_minus()
        iv = acc.to_interval()
        if iv.width < Fraction(1, 2):
            return iv.nearest_integer()
        prec *= 2
    raise ArithmeticError("could not certify H_n(1) within the precision cap")


@dataclass
class TowerLevel:
    n: int
    degree: int
    value: int
    method: str
    cross_checked: bool = False


def h_tower(u: UnitCertificate, n_max: int) -> list[TowerLevel]:
    """H_n(1) for n = 1..n_max.

    Degrees below 200 use exact resultants; larger degrees use the certified
    interval product, checked against a single exact resultant whenever
    H_{n-1} is still small enough to build.
    """
    if not u.totally_positive:
        raise DomainError("the H tower is only defined for totally positive units")
    if n_max < 1:
        raise DomainError("depth must be at least 1")
    H = u.H
    t = H.degree
    levels = []
    polys: dict[int, Poly] = {1: H}
    G = BiPoly.homogenize(H)
    for n in range(1, n_max + 1):
        deg = t**n
        if deg < EXACT_DEGREE_LIMIT:
            if n not in polys:
                polys[n] = resultant_in_x(polys[n - 1], G)
            Hn = polys[n]
            if Hn.degree != deg or Hn.lc != 1:
                raise InconsistencyError(f"H_{n} has degree {Hn.degree}, expected monic of degree {deg}")
            value = int(Hn(1))
            checked = False
            if deg <= CROSS_CHECK_DEGREE and value != 0:
                if tower_value_by_intervals(H, n) != value:
                    raise InconsistencyError(f"H_{n}(1): exact and interval values disagree")
                checked = True
            if n > 1 and tower_value_by_resultant(polys[n - 1], H) != value:
                raise InconsistencyError(f"H_{n}(1): tower polynomial and single resultant disagree")
            levels.append(TowerLevel(n, deg, value, "exact-resultant", checked))
        else:
            try:
                value = tower_value_by_intervals(H, n)
                method = "interval-product"
            except ArithmeticError:
                if n - 1 in polys:
                    value = tower_value_by_resultant(polys[n - 1], H)
                    method = "single-resultant"
                else:
                    raise
            checked = False
            if method == "interval-product" and n - 1 in polys:
                if tower_value_by_resultant(polys[n - 1], H) != value:
                    raise InconsistencyError(f"H_{n}(1): interval and single-resultant values disagree")
                checked = True
            levels.append(TowerLevel(n, deg, value, method, checked))
    return levels


@dataclass
class RkCertificate:
    units: list[UnitCertificate]
    d: int
    depth: int
    values: list[list[int]]  # values[k][n-1] for unit k
    A: list[int]
    R_multiple: int
    conclusive: bool
    methods: list[list[str]] = field(default_factory=list)

    def certifies(self, p: int, D_K: int) -> bool:
        """Whether p does not divide D_K * R_multiple (so the irreducibility criterion applies)."""
        return self.conclusive and (D_K * self.R_multiple) % p != 0

    def to_json(self) -> dict:
        return {
            "units": [u.to_json() for u in self.units],
            "d": self.d,
            "depth": self.depth,
            "H_n(1)": [[str(v) for v in row] for row in self.values],
            "methods": self.methods,
            "A_n": [str(a) for a in self.A],
            "R_multiple": str(self.R_multiple),
            "conclusive": self.conclusive,
        }


def rk_multiple(units: Sequence[UnitCertificate], d: int, depth: int | None = None) -> RkCertificate:
    """A_n = gcd over the supplied units, R_multiple = prod A_n."""
    if not units:
        raise DomainError("at least one totally positive unit is required")
    top = d // 2
    depth = top if depth is None else depth
    if depth < 1 or depth > top:
        raise DomainError(f"depth must lie in 1..{top} for a field of degree {d}")
    values, methods = [], []
    for u in units:
        levels = h_tower(u, depth)
        values.append([lv.value for lv in levels])
        methods.append([lv.method for lv in levels])
    A = [reduce(math.gcd, (row[n] for row in values), 0) for n in range(depth)]
    R = reduce(lambda a, b: a * b, A, 1)
    return RkCertificate(list(units), d, depth, values, A, R, all(a != 0 for a in A), methods)


def strip_small_primes(n: int, bound: int) -> int:
    """Remove every prime factor <= bound from n; returns the cofactor."""
    if n == 0:
        return 0
    n = abs(n)
    for q in range(2, bound + 1):
        while n % q == 0:
            n //= q
    return n


# ---------------------------------------------------------------------------
# signs and the narrow class number


def sign_vector(K: NumberField, x: FieldElement) -> int:
    """Sign pattern packed as bits: bit i set when the i-th embedding is negative."""
    return sum(1 << i for i, s in enumerate(K.signs(x)) if s < 0)


@dataclass
class NarrowClassReport:
    h: int
    d: int
    sign_vectors: list[tuple[int, ...]]
    rank: int

    @property
    def h_plus(self) -> int:
        return self.h * 2 ** (self.d - self.rank)

    @property
    def index_totally_positive(self) -> int:
        """[U_K : U_K^+]."""
        return 2**self.rank

    def to_json(self) -> dict:
        return {
            "h_K": self.h,
            "d": self.d,
            "sign_vectors": [list(v) for v in self.sign_vectors],
            "rank": self.rank,
            "h_plus": self.h_plus,
        }


def narrow_class_report(K: NumberField) -> NarrowClassReport:
    if K.d > 1 and len(K.fundamental_units) != K.d - 1:
        raise ConfigurationError(f"{K.label}: expected {K.d - 1} fundamental units")
    gens = [-K.one] + list(K.fundamental_units)
    vecs = [K.signs(g) for g in gens]
    rank = _f2_rank(sum(1 << i for i, s in enumerate(v) if s < 0) for v in vecs)
    return NarrowClassReport(K.h, K.d, vecs, rank)


def narrow_class_number(K: NumberField) -> int:
    return narrow_class_report(K).h_plus


# ---------------------------------------------------------------------------
# ray class numbers in the principal case


def _closure(gens: Sequence[int], mul, identity: int, cap: int = CLOSURE_CAP) -> set[int]:
    """Breadth-first closure of ``gens`` under a batched multiplication.

    ``mul(array, g)`` multiplies every code in the array by the code g.
    """
    seen = {identity}
    frontier = np.array([identity], dtype=np.int64)
    while frontier.size:
        new = []
        for g in gens:
            prods = mul(frontier, g)
            for c in np.unique(prods).tolist():
                if c not in seen:
                    seen.add(c)
                    new.append(c)
        if len(seen) > cap:
            raise ConfigurationError("ray class group enumeration exceeded the cap")
        frontier = np.array(new, dtype=np.int64)
    return seen


@dataclass
class RayClassReport:
    field_label: str
    modulus: str
    infinite: bool
    residue_group_order: int
    group_order: int
    unit_image_order: int
    h: int

    @property
    def ray_class_number(self) -> int:
        num = self.group_order * self.h
        if num % self.unit_image_order:
            raise InconsistencyError("unit image order does not divide the group order")
        return num // self.unit_image_order

    def to_json(self) -> dict:
        return {
            "field": self.field_label,
            "modulus": self.modulus,
            "all_infinite_places": self.infinite,
            "residue_unit_group_order": self.residue_group_order,
            "group_order": self.group_order,
            "unit_image_order": self.unit_image_order,
            "h_K": self.h,
            "ray_class_number": self.ray_class_number,
        }


def _residue_setup(K: NumberField, modulus):
    """Return (order of (O/m)^*, encoder, batched multiplier, identity code, label)."""
    if isinstance(modulus, PrimeIdealData):
        q = modulus
        F = q.residue_field
        order = q.norm - 1
        if q.norm > CLOSURE_CAP:
            raise ConfigurationError("residue field too large to enumerate")
        if F.degree == 1:
            p = q.p

            def mul(arr, g):
                return (arr * g) % p

        else:
            table_mul = F.mul

            def mul(arr, g):
                return np.array([table_mul(int(a), g) for a in arr.tolist()], dtype=np.int64)

        def enc(x: FieldElement) -> int:
            c = reduce_mod_prime(x, q)
            if c == 0:
                raise DomainError("unit reduced to zero")
            return c

        label = f"prime above {q.p} (e={q.e}, f={q.f}, index {q.index})"
        return order, enc, mul, 1, label
    if modulus in ("4O_K", "4", 4):
        R = QuotientRingMod4(K)

        def mul(arr, g):
            return R.mul(arr, np.full(arr.shape, g, dtype=np.int64))

        return R.order, R.encode, mul, R.encode(K.one), "4O_K"
    if modulus in ("O_K", "1", 1):
        return 1, (lambda x: 0), (lambda arr, g: arr * 0), 0, "O_K"
    raise DomainError(f"unsupported modulus {modulus!r}")


def ray_class_number(K: NumberField, modulus, include_all_infinite: bool = False) -> RayClassReport:
    """Ray class number for h_K = 1 as |(O/m)^* x {+-1}^r| / |image of units|."""
    if K.h != 1:
        raise ConfigurationError(f"{K.label}: ray class numbers are only supported when h_K = 1")
    order, enc, rmul, ident, label = _residue_setup(K, modulus)
    r = K.d if include_all_infinite else 0
    shift = r

    def comb_mul(arr, g):
        res = rmul(arr >> shift, g >> shift)
        return (res << shift) | ((arr ^ g) & ((1 << shift) - 1))

    gens = []
    for u in [-K.one] + list(K.fundamental_units):
        code = enc(u) << shift
        if r:
            code |= sign_vector(K, u)
        gens.append(code)
    img = _closure(gens, comb_mul, ident << shift)
    return RayClassReport(K.label, label, include_all_infinite, order, order * 2**r, len(img), K.h)


# ---------------------------------------------------------------------------
# the K = K^{4O_K} criterion


@dataclass
class Theorem17Verdict:
    field_label: str
    two_totally_ramified: bool
    h: int
    h_plus: int
    G_order: int
    G_mod_squares: int
    unit_image_order: int
    surjective: bool
    spans_mod_squares: bool
    ray_class_field_trivial: bool

    @property
    def corollary_consistent(self) -> bool:
        if not self.two_totally_ramified:
            return True
        return (self.h_plus == 1) == self.ray_class_field_trivial

    @property
    def passes(self) -> bool:
        return self.two_totally_ramified and self.h_plus == 1 and self.surjective and self.spans_mod_squares

    def to_json(self) -> dict:
        return {
            "field": self.field_label,
            "two_totally_ramified": self.two_totally_ramified,
            "h_K": self.h,
            "h_plus": self.h_plus,
            "G_order": self.G_order,
            "G_mod_G2": self.G_mod_squares,
            "unit_image_order": self.unit_image_order,
            "units_surject_onto_G": self.surjective,
            "units_span_G_mod_G2": self.spans_mod_squares,
            "K_equals_ray_class_field_mod_4": self.ray_class_field_trivial,
            "corollary_consistent": self.corollary_consistent,
            "passes": self.passes,
        }


def theorem17_check(K: NumberField) -> Theorem17Verdict:
    tr = K.two_totally_ramified
    h_plus = narrow_class_number(K)
    R = QuotientRingMod4(K)
    img = R.unit_image_group
    surj = int(img.size) == R.order
    span = R.units_span_mod_squares()
    # ray class number mod 4O_K is h_K * |G| / |unit image|
    trivial = K.h == 1 and surj
    v = Theorem17Verdict(K.label, tr, K.h, h_plus, R.order, R.index_of_squares, int(img.size), surj, span, trivial)
    if tr and not v.corollary_consistent:
        raise InconsistencyError(f"{K.label}: h+ = {h_plus} but K = K^(4O_K) is {trivial}")
    return v


def find_normalizing_unit(K: NumberField, a: FieldElement) -> FieldElement:
    """A unit eps with eps^(-1) = -a mod 4O_K, built from -1 and the fundamental units."""
    if not a.is_integral():
        raise DomainError("a must be integral")
    if a.norm() % 2 == 0:
        raise DomainError("a must be coprime to 2")
    R = QuotientRingMod4(K)
    gens_el = [-K.one] + list(K.fundamental_units)
    gens = [R.encode(g) for g in gens_el]
    target = R.encode(K.one)
    # eps must satisfy eps * (-a) = 1 mod 4
    minus_a = R.encode(-a)
    parent: dict[int, tuple[int, int]] = {R.encode(K.one): (-1, -1)}
    frontier = [R.encode(K.one)]
    goal = None
    for c in frontier:
        if R.mul1(c, minus_a) == target:
            goal = c
    while goal is None and frontier:
        arr = np.array(frontier, dtype=np.int64)
        new = []
        for gi, g in enumerate(gens):
            prods = R.mul(arr, np.full(arr.shape, g, dtype=np.int64)).tolist()
            for src, c in zip(frontier, prods):
                if c not in parent:
                    parent[c] = (src, gi)
                    new.append(c)
        if new:
            checks = R.mul(np.array(new, dtype=np.int64), np.full(len(new), minus_a, dtype=np.int64)).tolist()
            for c, chk in zip(new, checks):
                if chk == target:
                    goal = c
                    break
        frontier = new
    if goal is None:
        raise InconsistencyError(f"{K.label}: no unit is congruent to (-a)^(-1) mod 4")
    eps = K.one
    c = goal
    while parent[c][0] != -1:
        src, gi = parent[c]
        eps = eps * gens_el[gi]
        c = src
    if R.mul1(R.encode(eps), minus_a) != target:
        raise InconsistencyError("normalising unit failed verification")
    return eps
