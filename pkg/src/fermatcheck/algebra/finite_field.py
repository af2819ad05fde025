"""Polynomials over prime fields, their factorisation, and extension fields.

Polynomials over F_p are plain lists of residues in ascending degree order,
always trimmed.  Elements of F_{p^f} are encoded as integers in base p
(the digit of p^i is the coefficient of x^i), so elements of F_p are just
their residues.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import isqrt
from typing import Iterator, Sequence

from sympy import isprime

from ..errors import DomainError
from .poly import Poly

FACTOR_SEED = 20240601


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or p < 2 or not isprime(p):
        raise DomainError(f"{p} is not a prime")


# ---------------------------------------------------------------------------
# dense arithmetic in F_p[x]


def gf_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def gf_from_poly(f: Poly, p: int) -> list[int]:
    out = []
    for c in f.coeffs:
        if isinstance(c, int):
            out.append(c % p)
        else:
            if c.denominator % p == 0:
                raise DomainError(f"coefficient {c} is not p-integral for p={p}")
            out.append(c.numerator * pow(c.denominator, -1, p) % p)
    return gf_trim(out)


def gf_add(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    return gf_trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def gf_sub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    return gf_trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def gf_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return gf_trim([c % p for c in out])


def gf_scale(a: Sequence[int], c: int, p: int) -> list[int]:
    return gf_trim([x * c % p for x in a])


def gf_divmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    if not b:
        raise ZeroDivisionError("division by zero polynomial mod p")
    rem = list(a)
    db = len(b) - 1
    if len(rem) - 1 < db:
        return [], gf_trim(rem)
    inv = pow(b[-1], -1, p)
    quo = [0] * (len(rem) - db)
    for k in range(len(rem) - 1 - db, -1, -1):
        c = rem[k + db] % p
        if c == 0:
            continue
        q = c * inv % p
        quo[k] = q
        for j, bj in enumerate(b):
            rem[k + j] = (rem[k + j] - q * bj) % p
    return gf_trim(quo), gf_trim([r % p for r in rem[:db]])


def gf_rem(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    return gf_divmod(a, b, p)[1]


def gf_monic(a: Sequence[int], p: int) -> list[int]:
    if not a:
        return []
    return gf_scale(a, pow(a[-1], -1, p), p)


def gf_gcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = list(a), list(b)
    while b:
        a, b = b, gf_rem(a, b, p)
    return gf_monic(a, p)


def gf_deriv(a: Sequence[int], p: int) -> list[int]:
    return gf_trim([i * c % p for i, c in enumerate(a)][1:])


def gf_powmod(a: Sequence[int], n: int, m: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = gf_rem(a, m, p)
    while n:
        if n & 1:
            result = gf_rem(gf_mul(result, base, p), m, p)
        base = gf_rem(gf_mul(base, base, p), m, p)
        n >>= 1
    return result


def gf_eval(a: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


# ---------------------------------------------------------------------------
# factorisation: squarefree, distinct degree, equal degree


def _gf_pth_root(a: Sequence[int], p: int) -> list[int]:
    # a(x) = b(x^p) with coefficients in F_p, where c^p = c
    return gf_trim([a[i] for i in range(0, len(a), p)])


def gf_sqf_list(f: Sequence[int], p: int) -> list[tuple[list[int], int]]:
    """Squarefree decomposition of a monic polynomial over F_p."""
    f = gf_monic(f, p)
    out: list[tuple[list[int], int]] = []
    if len(f) <= 1:
        return out
    df = gf_deriv(f, p)
    if not df:
        for g, m in gf_sqf_list(_gf_pth_root(f, p), p):
            out.append((g, m * p))
        return out
    c = gf_gcd(f, df, p)
    w = gf_divmod(f, c, p)[0]
    i = 1
    while len(w) > 1:
        y = gf_gcd(w, c, p)
        z = gf_divmod(w, y, p)[0]
        if len(z) > 1:
            out.append((gf_monic(z, p), i))
        i += 1
        w, c = y, gf_divmod(c, y, p)[0]
    if len(c) > 1:
        for g, m in gf_sqf_list(_gf_pth_root(c, p), p):
            out.append((g, m * p))
    return out


def gf_ddf(f: Sequence[int], p: int) -> list[tuple[list[int], int]]:
    """Distinct degree factorisation of a squarefree monic polynomial."""
    out = []
    f = list(f)
    h = [0, 1]
    x = [0, 1]
    d = 0
    while len(f) - 1 >= 2 * (d + 1):
        d += 1
        h = gf_powmod(h, p, f, p)
        g = gf_gcd(f, gf_sub(h, x, p), p)
        if len(g) > 1:
            out.append((g, d))
            f = gf_divmod(f, g, p)[0]
            h = gf_rem(h, f, p)
    if len(f) > 1:
        out.append((gf_monic(f, p), len(f) - 1))
    return out


def gf_edf(f: Sequence[int], d: int, p: int, rng: random.Random) -> list[list[int]]:
    """Cantor-Zassenhaus equal degree splitting into factors of degree d."""
    f = list(f)
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        r = [rng.randrange(p) for _ in range(n)]
        r = gf_trim(r)
        if len(r) <= 1:
            continue
        if p == 2:
            # trace map r + r^2 + ... + r^(2^(d-1))
            acc = list(r)
            t = list(r)
            for _ in range(d - 1):
                t = gf_rem(gf_mul(t, t, p), f, p)
                acc = gf_add(acc, t, p)
            g = gf_gcd(f, acc, p)
        else:
            e = (p**d - 1) // 2
            s = gf_powmod(r, e, f, p)
            g = gf_gcd(f, gf_sub(s, [1], p), p)
        if 1 < len(g) < len(f):
            break
    other = gf_divmod(f, g, p)[0]
    return gf_edf(g, d, p, rng) + gf_edf(gf_monic(other, p), d, p, rng)


def _gf_key(g: Sequence[int]):
    return (len(g), list(reversed(g)))


def factor_mod_p(f: Poly, p: int, seed: int = FACTOR_SEED) -> list[tuple[Poly, int]]:
    """Factor f modulo p into monic irreducibles with multiplicity.

    The result is sorted by (degree, coefficients) so factor indices are stable.
    """
    _check_prime(p)
    a = gf_from_poly(f, p)
    if not a:
        raise DomainError(f"polynomial vanishes modulo {p}")
    if len(a) == 1:
        return []
    rng = random.Random(seed)
    factors: list[tuple[list[int], int]] = []
    for g, mult in gf_sqf_list(a, p):
        for h, d in gf_ddf(g, p):
            for piece in gf_edf(h, d, p, rng):
                factors.append((gf_monic(piece, p), mult))
    factors.sort(key=lambda fm: (_gf_key(fm[0]), fm[1]))
    return [(Poly(g), m) for g, m in factors]


def is_irreducible_mod_p(f: Sequence[int], p: int) -> bool:
    f = gf_monic(list(f), p)
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    sq = gf_sqf_list(f, p)
    if len(sq) != 1 or sq[0][1] != 1:
        return False
    ddf = gf_ddf(f, p)
    return len(ddf) == 1 and ddf[0][1] == n


# ---------------------------------------------------------------------------
# extension fields


@dataclass(frozen=True)
class FiniteField:
    """F_p[x]/(g) for a monic irreducible g of degree f."""

    p: int
    modulus: tuple[int, ...] = (0, 1)
    _checked: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        _check_prime(self.p)
        g = gf_monic([c % self.p for c in self.modulus], self.p)
        object.__setattr__(self, "modulus", tuple(g))
        if not is_irreducible_mod_p(g, self.p):
            raise DomainError(f"modulus {g} is not irreducible mod {self.p}")

    @classmethod
    def prime(cls, p: int) -> "FiniteField":
        return cls(p, (0, 1))

    @property
    def degree(self) -> int:
        return len(self.modulus) - 1

    @property
    def order(self) -> int:
        return self.p**self.degree

    def __len__(self):
        return self.order

    # encoding
    def encode(self, coeffs: Sequence[int]) -> int:
        coeffs = gf_rem([c % self.p for c in coeffs], self.modulus, self.p)
        v = 0
        for c in reversed(coeffs):
            v = v * self.p + c
        return v

    def decode(self, x: int) -> list[int]:
        out = []
        for _ in range(self.degree):
            x, r = divmod(x, self.p)
            out.append(r)
        return gf_trim(out)

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.order))

    def from_int(self, n: int) -> int:
        return n % self.p

    # arithmetic
    def add(self, a: int, b: int) -> int:
        if self.degree == 1:
            return (a + b) % self.p
        return self.encode(gf_add(self.decode(a), self.decode(b), self.p))

    def neg(self, a: int) -> int:
        if self.degree == 1:
            return -a % self.p
        return self.encode(gf_scale(self.decode(a), self.p - 1, self.p))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.degree == 1:
            return a * b % self.p
        return self.encode(gf_rem(gf_mul(self.decode(a), self.decode(b), self.p), self.modulus, self.p))

    def pow(self, a: int, n: int) -> int:
        if self.degree == 1:
            return pow(a, n, self.p)
        if n < 0:
            a, n = self.inv(a), -n
        return self.encode(gf_powmod(self.decode(a), n, list(self.modulus), self.p))

    def inv(self, a: int) -> int:
        if a == 0:
            raise DomainError("inverse of zero in a finite field")
        if self.degree == 1:
            return pow(a, -1, self.p)
        return self.pow(a, self.order - 2)

    def quadratic_character(self, a: int) -> int:
        """chi(a) in {-1, 0, 1}, computed as a^((q-1)/2); chi(0) = 0."""
        if a == 0:
            return 0
        if self.p == 2:
            return 1
        r = self.pow(a, (self.order - 1) // 2)
        return 1 if r == 1 else -1


def count_points_legendre(s: int, t: int, field: FiniteField) -> int:
    """Number of projective points on y^2 = x(x - s)(x + t) over the field."""
    if field.p == 2:
        raise DomainError("Legendre-form point count needs odd characteristic")
    neg_t = field.neg(t)
    if s == 0 or t == 0 or s == neg_t:
        raise DomainError("the cubic x(x - s)(x + t) has a repeated root")
    total = field.order + 1
    if field.degree == 1:
        p = field.p
        e = (p - 1) // 2
        for x in range(p):
            v = x * (x - s) * (x + t) % p
            if v:
                total += 1 if pow(v, e, p) == 1 else -1
        return total
    for x in field:
        v = field.mul(field.mul(x, field.sub(x, s)), field.add(x, t))
        total += field.quadratic_character(v)
    return total


def count_points_bruteforce(s: int, t: int, field: FiniteField) -> int:
    """Exhaustive (x, y) enumeration plus the point at infinity."""
    squares: dict[int, int] = {}
    for y in field:
        y2 = field.mul(y, y)
        squares[y2] = squares.get(y2, 0) + 1
    total = 1
    for x in field:
        v = field.mul(field.mul(x, field.sub(x, s)), field.add(x, t))
        total += squares.get(v, 0)
    return total


def hasse_bound_ok(points: int, q: int) -> bool:
    a = q + 1 - points
    return a * a <= 4 * q


def isqrt_ceil(n: int) -> int:
    r = isqrt(n)
    return r if r * r == n else r + 1
