"""Totally real number fields with a supplied integral basis.

Elements are stored by their rational coordinates over the integral basis.
Multiplication goes through integer structure constants computed once per
field.  Maximal orders are never computed here; the basis is taken as given
and checked against the claimed discriminant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np
from sympy import isprime

from .algebra.finite_field import FiniteField, factor_mod_p, gf_from_poly, gf_rem
from .algebra.poly import Poly, discriminant, fraction_det
from .algebra.realroots import RealInterval, RealRoots, certified_sign, eval_interval
from .errors import ConfigurationError, DomainError, IndexObstructionError

Number = int | Fraction


def _v2(n: int) -> int:
    n = abs(n)
    return (n & -n).bit_length() - 1


def vp_int(n: int, p: int) -> int:
    if n == 0:
        raise DomainError("valuation of zero")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_rational(x: Number, p: int) -> int:
    x = Fraction(x)
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def _solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Solve matrix * x = rhs over Q by Gauss-Jordan elimination."""
    n = len(matrix)
    a = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(matrix, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise DomainError("singular linear system")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def _inverse(matrix: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(matrix)
    cols = [_solve(matrix, [Fraction(int(i == j)) for i in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _f2_rank(rows: Iterable[int]) -> int:
    """Rank over F_2 of vectors packed as integer bitmasks."""
    basis: list[int] = []
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


class NumberField:
    """K = Q(alpha) with min_poly(alpha) = 0 and a trusted integral basis.

    ``integral_basis`` rows give each basis element in the power basis
    1, alpha, ..., alpha^(d-1).  ``fundamental_units`` are coordinate vectors
    over the integral basis.
    """

    def __init__(
        self,
        label: str,
        min_poly: Poly,
        integral_basis: Sequence[Sequence[Number]] | None = None,
        disc: int | None = None,
        class_number: int = 1,
        fundamental_units: Sequence[Sequence[Number]] = (),
        notes: str = "",
        check: bool = True,
    ):
        self.label = label
        self.min_poly = min_poly
        self.d = min_poly.degree
        d = self.d
        if integral_basis is None:
            integral_basis = [[int(i == j) for j in range(d)] for i in range(d)]
        self.basis = tuple(tuple(Fraction(c) for c in row) for row in integral_basis)
        self.claimed_disc = disc
        self.h = class_number
        self.notes = notes
        self._unit_coords = [tuple(Fraction(c) for c in u) for u in fundamental_units]
        if check:
            self._validate()
        self._basis_inv = _inverse([list(r) for r in self.basis])

    # ------------------------------------------------------------------ checks
    def _validate(self):
        f, d = self.min_poly, self.d
        if d < 1:
            raise ConfigurationError(f"{self.label}: defining polynomial must have positive degree")
        if not f.is_integral() or f.lc != 1:
            raise ConfigurationError(f"{self.label}: defining polynomial must be monic with integer coefficients")
        if len(self.basis) != d or any(len(r) != d for r in self.basis):
            raise ConfigurationError(f"{self.label}: integral basis must be a {d}x{d} matrix")
        if fraction_det(self.basis) == 0:
            raise ConfigurationError(f"{self.label}: integral basis matrix is singular")
        if d > 1 and len(self.real_roots) != d:
            raise ConfigurationError(f"{self.label}: defining polynomial is not totally real")
        if self.claimed_disc is not None and self.disc != self.claimed_disc:
            raise ConfigurationError(
                f"{self.label}: discriminant of the integral basis is {self.disc}, expected {self.claimed_disc}"
            )
        for i, row in enumerate(self.structure_constants):
            for j, vec in enumerate(row):
                if any(c.denominator != 1 for c in vec):
                    raise ConfigurationError(f"{self.label}: basis is not closed under multiplication (w{i}*w{j})")
        for k, u in enumerate(self.fundamental_units):
            n = u.norm()
            if abs(n) != 1:
                raise ConfigurationError(f"{self.label}: fundamental unit #{k} has norm {n}")
            if not u.is_integral():
                raise ConfigurationError(f"{self.label}: fundamental unit #{k} is not integral")
        seen = set()
        for u in self.fundamental_units:
            if u.coords in seen:
                raise ConfigurationError(f"{self.label}: repeated fundamental unit")
            seen.add(u.coords)

    # ------------------------------------------------------------ invariants
    @cached_property
    def poly_disc(self) -> int:
        return discriminant(self.min_poly) if self.d > 1 else 1

    @cached_property
    def disc(self) -> int:
        det = fraction_det(self.basis)
        val = det * det * self.poly_disc
        if val.denominator != 1:
            raise ConfigurationError(f"{self.label}: non-integral discriminant {val}")
        return int(val)

    @cached_property
    def index(self) -> int:
        """[O_K : Z[alpha]] recovered from disc(min_poly) / D_K."""
        q, r = divmod(self.poly_disc, self.disc)
        root = math.isqrt(q) if q >= 0 else -1
        if r or root * root != q:
            raise ConfigurationError(f"{self.label}: disc(min_poly)/D_K is not a square")
        return root

    @cached_property
    def real_roots(self) -> RealRoots:
        return RealRoots(self.min_poly)

    @cached_property
    def structure_constants(self) -> list[list[tuple[Fraction, ...]]]:
        """T[i][j] = coordinates of w_i * w_j over the integral basis."""
        d = self.d
        out = []
        for i in range(d):
            row = []
            for j in range(d):
                prod = self._power_mul(self.basis[i], self.basis[j])
                row.append(self._from_power(prod))
            out.append(row)
        return out

    @cached_property
    def _int_table(self) -> np.ndarray:
        """Structure constants as an int64 array of shape (d, d, d)."""
        return np.array(
            [[[int(c) for c in vec] for vec in row] for row in self.structure_constants], dtype=np.int64
        )

    @cached_property
    def one(self) -> "FieldElement":
        return self.from_power([1])

    @cached_property
    def alpha(self) -> "FieldElement":
        return self.from_power([0, 1]) if self.d > 1 else self.from_power([0])

    @cached_property
    def fundamental_units(self) -> list["FieldElement"]:
        return [FieldElement(self, c) for c in self._unit_coords]

    @property
    def torsion_units(self) -> list["FieldElement"]:
        return [-self.one]

    # ------------------------------------------------------------- conversion
    def _power_mul(self, a: Sequence[Number], b: Sequence[Number]) -> list[Fraction]:
        prod = (Poly(a) * Poly(b)) % self.min_poly
        coeffs = [Fraction(c) for c in prod.coeffs]
        return coeffs + [Fraction(0)] * (self.d - len(coeffs))

    def _from_power(self, power: Sequence[Number]) -> tuple[Fraction, ...]:
        power = list(power) + [0] * (self.d - len(power))
        inv = self._basis_inv if hasattr(self, "_basis_inv") else _inverse([list(r) for r in self.basis])
        return tuple(
            sum((Fraction(power[i]) * inv[i][j] for i in range(self.d)), Fraction(0)) for j in range(self.d)
        )

    def to_power(self, coords: Sequence[Number]) -> list[Fraction]:
        return [sum((Fraction(coords[i]) * self.basis[i][j] for i in range(self.d)), Fraction(0)) for j in range(self.d)]

    def from_power(self, power: Sequence[Number]) -> "FieldElement":
        p = Poly([Fraction(c) for c in power]) % self.min_poly if self.d > 0 else Poly(())
        return FieldElement(self, self._from_power(list(p.coeffs)))

    def element(self, coords: Sequence[Number]) -> "FieldElement":
        return FieldElement(self, coords)

    def __call__(self, x) -> "FieldElement":
        if isinstance(x, FieldElement):
            return x
        if isinstance(x, (int, Fraction)):
            return self.from_power([x])
        return self.from_power(x)

    # ------------------------------------------------------------ embeddings
    def embeddings(self, x: "FieldElement", bits: int = 64) -> list[RealInterval]:
        poly = Poly(x.power_coords)
        if self.d == 1:
            return [RealInterval.point(poly(0))]
        return [eval_interval(poly, iv) for iv in self.real_roots.at_bits(bits)]

    def signs(self, x: "FieldElement") -> tuple[int, ...]:
        if x.is_zero():
            raise DomainError("sign of zero")
        if self.d == 1:
            return (1 if x.coords[0] > 0 else -1,)
        return tuple(certified_sign(x.power_coords, self.real_roots, i) for i in range(self.d))

    def is_totally_positive(self, x: "FieldElement") -> bool:
        return all(s > 0 for s in self.signs(x))

    # ------------------------------------------------------------ ramification
    @cached_property
    def two_adic_frobenius_rank(self) -> int:
        """Rank over F_2 of x -> x^(2^k) on O_K/2O_K with 2^k >= d.

        This equals the sum of the residue degrees of the primes above 2 and
        is computed without reference to Z[alpha], so it is valid even when 2
        divides the index.
        """
        k = max(1, (self.d - 1).bit_length())
        rows = []
        for i in range(self.d):
            w = FieldElement(self, [int(i == j) for j in range(self.d)])
            y = w
            for _ in range(k):
                y = y.mul_mod(y, 2)
            rows.append(sum((int(c) % 2) << j for j, c in enumerate(y.coords)))
        return _f2_rank(rows)

    @cached_property
    def two_totally_ramified(self) -> bool:
        """True when 2 O_K = L^d for a single prime L (always true over Q)."""
        return self.two_adic_frobenius_rank == 1

    def require_two_totally_ramified(self):
        if not self.two_totally_ramified:
            raise ConfigurationError(f"{self.label}: 2 is not totally ramified")

    def __repr__(self):
        return f"NumberField({self.label!r}, {self.min_poly})"


@dataclass(frozen=True)
class FieldElement:
    """An element of K given by rational coordinates over the integral basis."""

    field: NumberField = field(repr=False, compare=False, hash=False)
    coords: tuple[Fraction, ...] = ()

    def __post_init__(self):
        d = self.field.d
        c = [Fraction(x) for x in self.coords]
        if len(c) > d:
            raise DomainError(f"expected {d} coordinates, got {len(c)}")
        c += [Fraction(0)] * (d - len(c))
        object.__setattr__(self, "coords", tuple(c))

    def _same(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise DomainError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_power([other])
        return NotImplemented

    @property
    def power_coords(self) -> list[Fraction]:
        return self.field.to_power(self.coords)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    @property
    def denominator(self) -> int:
        return reduce(math.lcm, (c.denominator for c in self.coords), 1)

    def __eq__(self, other):
        o = self._same(other)
        if o is NotImplemented:
            return False
        return self.coords == o.coords

    def __hash__(self):
        return hash(self.coords)

    def __add__(self, other):
        o = self._same(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, [a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, [-a for a in self.coords])

    def __sub__(self, other):
        o = self._same(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, [a - b for a, b in zip(self.coords, o.coords)])

    def __rsub__(self, other):
        return self._same(other) - self

    def __mul__(self, other):
        o = self._same(other)
        if o is NotImplemented:
            return o
        T = self.field.structure_constants
        d = self.field.d
        out = [Fraction(0)] * d
        for i, a in enumerate(self.coords):
            if a == 0:
                continue
            for j, b in enumerate(o.coords):
                if b == 0:
                    continue
                ab = a * b
                for k, t in enumerate(T[i][j]):
                    if t:
                        out[k] += ab * t
        return FieldElement(self.field, out)

    __rmul__ = __mul__

    def mul_mod(self, other: "FieldElement", m: int) -> "FieldElement":
        """Product of integral elements with coordinates reduced mod m."""
        prod = self * other
        return FieldElement(self.field, [int(c) % m for c in prod.coords])

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        o = self._same(other)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._same(other) * self.inverse()

    def multiplication_matrix(self) -> list[list[Fraction]]:
        """Row j holds the coordinates of self * w_j."""
        d = self.field.d
        rows = []
        for j in range(d):
            w = FieldElement(self.field, [int(i == j) for i in range(d)])
            rows.append(list((self * w).coords))
        return rows

    def norm(self) -> Number:
        n = fraction_det(self.multiplication_matrix())
        return n.numerator if n.denominator == 1 else n

    def trace(self) -> Number:
        m = self.multiplication_matrix()
        t = sum((m[i][i] for i in range(len(m))), Fraction(0))
        return t.numerator if t.denominator == 1 else t

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise DomainError("inverse of zero")
        m = self.multiplication_matrix()
        # solve sum_j y_j (self * w_j) = 1
        one = list(self.field.one.coords)
        cols = [[m[j][i] for j in range(len(m))] for i in range(len(m))]
        y = _solve(cols, one)
        return FieldElement(self.field, y)

    def minimal_polynomial(self) -> Poly:
        """Characteristic polynomial of multiplication, reduced to the minimal one."""
        from .algebra.poly import poly_gcd

        char = charpoly(self.multiplication_matrix())
        g = poly_gcd(char, char.derivative()) if char.degree > 1 else Poly((1,))
        if g.degree <= 0:
            return char
        # char = m^(d/t); recover m by taking the squarefree part
        return char.exact_div(g).monic()

    def __repr__(self):
        return f"FieldElement({[str(c) for c in self.coords]})"


def charpoly(m: list[list[Fraction]]) -> Poly:
    """Characteristic polynomial det(X*I - M) via Faddeev-LeVerrier."""
    n = len(m)
    M = [[Fraction(v) for v in row] for row in m]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    A = [[Fraction(0)] * n for _ in range(n)]
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        # A_k = M (A_{k-1} + c_{n-k+1} I)
        B = [[A[i][j] + coeffs[n - k + 1] * ident[i][j] for j in range(n)] for i in range(n)]
        A = [[sum((M[i][t] * B[t][j] for t in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]
        tr = sum((A[i][i] for i in range(n)), Fraction(0))
        coeffs[n - k] = -tr / k
    return Poly(coeffs)


# ---------------------------------------------------------------------------
# primes


@dataclass(frozen=True)
class PrimeIdealData:
    """A prime of O_K above p described by Dedekind's criterion."""

    p: int
    e: int
    f: int
    gen_poly: Poly
    index: int = 0
    field_label: str = ""

    @property
    def norm(self) -> int:
        return self.p**self.f

    @cached_property
    def residue_field(self) -> FiniteField:
        return FiniteField(self.p, tuple(self.gen_poly.coeffs))

    def describe(self) -> dict:
        return {
            "p": self.p,
            "e": self.e,
            "f": self.f,
            "index": self.index,
            "gen_poly": [str(c) for c in self.gen_poly.coeffs],
            "norm": str(self.norm),
        }


def dedekind_factor(K: NumberField, p: int) -> list[PrimeIdealData]:
    """Primes above p from the factorisation of min_poly mod p."""
    if not isinstance(p, int) or p < 2 or not isprime(p):
        raise DomainError(f"{p} is not a prime")
    if K.index % p == 0:
        raise IndexObstructionError(
            f"{K.label}: {p} divides the index [O_K : Z[alpha]] = {K.index}; "
            "supply the factorisation of this prime externally"
        )
    out = []
    for i, (g, mult) in enumerate(factor_mod_p(K.min_poly, p)):
        out.append(PrimeIdealData(p, mult, g.degree, g, i, K.label))
    if sum(q.e * q.f for q in out) != K.d:
        raise ArithmeticError("sum of e*f does not match the degree")
    return out


def v_L(K: NumberField, x: FieldElement | Number) -> int:
    """Valuation at the unique prime above 2, assuming 2 is totally ramified."""
    K.require_two_totally_ramified()
    if not isinstance(x, FieldElement):
        x = K(x)
    if x.is_zero():
        raise DomainError("valuation of zero")
    return vp_rational(x.norm(), 2)


def reduce_mod_prime(x: FieldElement, q: PrimeIdealData) -> int:
    """Image of x in O_K/q, encoded as an element of ``q.residue_field``."""
    power = x.power_coords
    for c in power:
        if c.denominator % q.p == 0:
            raise DomainError(f"element is not integral at a prime above {q.p}")
    a = gf_from_poly(Poly(power), q.p)
    r = gf_rem(a, list(q.residue_field.modulus), q.p)
    return q.residue_field.encode(r)


# ---------------------------------------------------------------------------
# O_K / 4 O_K


class QuotientRingMod4:
    """The finite ring O_K/4O_K and its unit group G.

    Residues are integer vectors mod 4 over the integral basis, encoded as
    ``sum c_i 4^i``.  Products are computed with numpy over batches.
    """

    MAX_DEGREE = 8

    def __init__(self, K: NumberField):
        if K.d > self.MAX_DEGREE:
            raise ConfigurationError(f"{K.label}: O_K/4O_K enumeration needs d <= {self.MAX_DEGREE}")
        self.field = K
        self.d = K.d
        self.size = 4**K.d
        self._T = K._int_table % 4
        self._pow4 = 4 ** np.arange(self.d, dtype=np.int64)
        self._unit_mask = self._compute_unit_mask()

    # encoding helpers
    def encode(self, x: FieldElement) -> int:
        if not x.is_integral():
            raise DomainError("only integral elements reduce mod 4")
        return int(sum((int(c) % 4) * 4**i for i, c in enumerate(x.coords)))

    def decode(self, code: int) -> FieldElement:
        return FieldElement(self.field, [(code >> (2 * i)) & 3 for i in range(self.d)])

    def _digits(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        return (codes[:, None] >> (2 * np.arange(self.d, dtype=np.int64))) & 3

    def _codes(self, digits: np.ndarray) -> np.ndarray:
        return (digits % 4) @ self._pow4

    def mul(self, a, b) -> np.ndarray:
        """Elementwise products of two code arrays (broadcast allowed)."""
        a = np.atleast_1d(np.asarray(a, dtype=np.int64))
        b = np.atleast_1d(np.asarray(b, dtype=np.int64))
        a, b = np.broadcast_arrays(a, b)
        da, db = self._digits(a.ravel()), self._digits(b.ravel())
        prod = np.einsum("ni,nj,ijk->nk", da, db, self._T) % 4
        return self._codes(prod).reshape(a.shape)

    def mul1(self, a: int, b: int) -> int:
        return int(self.mul([a], [b])[0])

    # units
    def _compute_unit_mask(self) -> np.ndarray:
        K = self.field
        d = self.d
        # a residue is a unit iff its reduction mod 2 has odd norm
        unit2 = np.zeros(2**d, dtype=bool)
        for code2 in range(2**d):
            coords = [(code2 >> i) & 1 for i in range(d)]
            x = FieldElement(K, coords)
            unit2[code2] = (x.norm() % 2) == 1 if not x.is_zero() else False
        all_codes = np.arange(self.size, dtype=np.int64)
        digits = self._digits(all_codes)
        code2 = (digits & 1) @ (2 ** np.arange(d, dtype=np.int64))
        return unit2[code2]

    @cached_property
    def units(self) -> np.ndarray:
        return np.nonzero(self._unit_mask)[0].astype(np.int64)

    @property
    def order(self) -> int:
        return int(self.units.size)

    def is_unit(self, code: int) -> bool:
        return bool(self._unit_mask[code])

    @cached_property
    def squares(self) -> np.ndarray:
        u = self.units
        return np.unique(self.mul(u, u))

    @property
    def index_of_squares(self) -> int:
        """|G / G^2|."""
        return self.order // int(self.squares.size)

    def closure(self, gens: Iterable[int], start: Iterable[int] = (1,), cap: int = 10**6) -> np.ndarray:
        """Subgroup generated by ``gens`` together with the subgroup ``start``."""
        gens = np.array(sorted(set(int(g) for g in gens)), dtype=np.int64)
        seen = np.zeros(self.size, dtype=bool)
        frontier = np.unique(np.asarray(list(start), dtype=np.int64))
        seen[frontier] = True
        while frontier.size and gens.size:
            prods = self.mul(frontier[:, None], gens[None, :]).ravel()
            prods = np.unique(prods)
            new = prods[~seen[prods]]
            seen[new] = True
            if seen.sum() > cap:
                raise ConfigurationError("subgroup closure exceeded the enumeration cap")
            frontier = new
        return np.nonzero(seen)[0].astype(np.int64)

    def unit_images(self) -> list[int]:
        K = self.field
        return [self.encode(-K.one)] + [self.encode(u) for u in K.fundamental_units]

    @cached_property
    def unit_image_group(self) -> np.ndarray:
        return self.closure(self.unit_images())

    def unit_map_surjective(self) -> bool:
        return int(self.unit_image_group.size) == self.order

    def units_span_mod_squares(self) -> bool:
        """Whether the unit image together with G^2 is all of G."""
        return int(self.closure(self.unit_images(), start=self.squares).size) == self.order


def quotient_mod4(K: NumberField) -> QuotientRingMod4:
    return QuotientRingMod4(K)
