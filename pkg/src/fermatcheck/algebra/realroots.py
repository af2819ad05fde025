"""Certified real roots: interval arithmetic, Sturm sequences, refinement.

Two interval types live here.  ``RealInterval`` has exact ``Fraction``
endpoints and is the public currency.  ``DyadicInterval`` stores both ends as
integer mantissas over a shared power of two with a bounded number of
significant bits; it is the workhorse for long products where Fraction
arithmetic would spend its time in gcds.  Both round outward, so the true
value always stays inside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ..errors import DomainError
from .poly import Poly, poly_gcd

Number = int | Fraction


def _floor_shift(m: int, k: int) -> int:
    return m >> k


def _ceil_shift(m: int, k: int) -> int:
    return -((-m) >> k)


def _round_down(x: Fraction, prec: int) -> Fraction:
    """Largest dyadic with ``prec`` significant bits that is <= x."""
    if x == 0:
        return Fraction(0)
    e = _exp_for(x, prec)
    if e >= 0:
        return Fraction(math.floor(x / (1 << e)) << e)
    return Fraction(math.floor(x * (1 << -e)), 1 << -e)


def _round_up(x: Fraction, prec: int) -> Fraction:
    return -_round_down(-x, prec)


def _exp_for(x: Fraction, prec: int) -> int:
    # exponent e such that |x| / 2^e has about prec bits
    a = abs(x)
    bits = a.numerator.bit_length() - a.denominator.bit_length()
    return bits - prec


@dataclass(frozen=True)
class RealInterval:
    """Closed interval [lo, hi] with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo > hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: Number) -> "RealInterval":
        return cls(Fraction(x), Fraction(x))

    @staticmethod
    def _coerce(other) -> "RealInterval":
        if isinstance(other, RealInterval):
            return other
        return RealInterval.point(other)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        if isinstance(x, RealInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    __contains__ = contains

    def overlaps(self, other: "RealInterval") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def sign(self) -> int | None:
        """+1 or -1 when the interval excludes zero, 0 for the point 0, else None."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        return None

    def __add__(self, other):
        o = self._coerce(other)
        return RealInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return RealInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        o = self._coerce(other)
        return RealInterval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RealInterval(min(ps), max(ps))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise DomainError("negative powers are not supported")
        if n % 2 == 0 and self.lo < 0 < self.hi:
            m = max(-self.lo, self.hi)
            return RealInterval(0, m**n)
        a, b = self.lo**n, self.hi**n
        return RealInterval(min(a, b), max(a, b))

    def rounded(self, prec: int) -> "RealInterval":
        """Outward rounding of both ends to ``prec`` significant bits."""
        return RealInterval(_round_down(self.lo, prec), _round_up(self.hi, prec))

    def nearest_integer(self) -> int:
        """The unique integer in the interval when the width is below 1/2."""
        if self.width >= Fraction(1, 2):
            raise ArithmeticError("interval too wide to round")
        lo, hi = math.ceil(self.lo), math.floor(self.hi)
        if lo != hi:
            raise ArithmeticError("interval contains no integer")
        return lo

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        return f"RealInterval({float(self.lo):.12g}, {float(self.hi):.12g})"


def eval_interval(p: Poly, x: RealInterval, prec: int | None = None) -> RealInterval:
    """Horner evaluation of p over an interval, optionally rounding each step."""
    acc = RealInterval.point(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
        if prec is not None:
            acc = acc.rounded(prec)
    return acc


# ---------------------------------------------------------------------------
# dyadic intervals for long products


class DyadicInterval:
    """[lo, hi] * 2^exp with integer mantissas of at most ``prec`` bits."""

    __slots__ = ("lo", "hi", "exp", "prec")

    def __init__(self, lo: int, hi: int, exp: int, prec: int):
        self.lo, self.hi, self.exp, self.prec = lo, hi, exp, prec
        self._normalize()

    def _normalize(self):
        excess = max(abs(self.lo).bit_length(), abs(self.hi).bit_length()) - self.prec
        if excess > 0:
            self.lo = _floor_shift(self.lo, excess)
            self.hi = _ceil_shift(self.hi, excess)
            self.exp += excess

    @classmethod
    def from_interval(cls, iv: RealInterval, prec: int) -> "DyadicInterval":
        # pick exponent so that the larger end has about prec bits
        m = max(abs(iv.lo), abs(iv.hi))
        if m == 0:
            return cls(0, 0, 0, prec)
        e = _exp_for(m, prec) - 2
        if e >= 0:
            lo = math.floor(iv.lo / (1 << e))
            hi = math.ceil(iv.hi / (1 << e))
        else:
            lo = math.floor(iv.lo * (1 << -e))
            hi = math.ceil(iv.hi * (1 << -e))
        return cls(lo, hi, e, prec)

    @classmethod
    def from_int(cls, n: int, prec: int) -> "DyadicInterval":
        return cls(n, n, 0, prec)

    def to_interval(self) -> RealInterval:
        if self.exp >= 0:
            return RealInterval(self.lo << self.exp, self.hi << self.exp)
        d = 1 << -self.exp
        return RealInterval(Fraction(self.lo, d), Fraction(self.hi, d))

    def __mul__(self, o: "DyadicInterval") -> "DyadicInterval":
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return DyadicInterval(min(ps), max(ps), self.exp + o.exp, self.prec)

    def _aligned(self, o: "DyadicInterval"):
        if self.exp == o.exp:
            return self.lo, self.hi, o.lo, o.hi, self.exp
        if self.exp > o.exp:
            s = self.exp - o.exp
            return self.lo << s, self.hi << s, o.lo, o.hi, o.exp
        s = o.exp - self.exp
        return self.lo, self.hi, o.lo << s, o.hi << s, self.exp

    def __add__(self, o: "DyadicInterval") -> "DyadicInterval":
        a, b, c, d, e = self._aligned(o)
        return DyadicInterval(a + c, b + d, e, self.prec)

    def __sub__(self, o: "DyadicInterval") -> "DyadicInterval":
        a, b, c, d, e = self._aligned(o)
        return DyadicInterval(a - d, b - c, e, self.prec)

    def one_minus(self) -> "DyadicInterval":
        return DyadicInterval.from_int(1, self.prec) - self


def certified_product(factors: Iterable[DyadicInterval], prec: int) -> RealInterval:
    acc = DyadicInterval.from_int(1, prec)
    for f in factors:
        acc = acc * f
    return acc.to_interval()


# ---------------------------------------------------------------------------
# Sturm sequences and isolation


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        r = seq[-2] % seq[-1]
        if r.is_zero():
            break
        # keep only the sign information, scaling by positive content
        r = -r
        c = abs(r.content())
        seq.append(r.scale(1 / c) if c else r)
    return seq


def _sign_changes(values: Sequence[Number]) -> int:
    signs = [1 if v > 0 else -1 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _signs_at(seq: list[Poly], x: Number) -> int:
    return _sign_changes([q(x) for q in seq])


def _signs_at_infinity(seq: list[Poly], positive: bool) -> int:
    vals = []
    for q in seq:
        s = 1 if q.lc > 0 else -1
        if not positive and q.degree % 2 == 1:
            s = -s
        vals.append(s)
    return _sign_changes(vals)


def squarefree(p: Poly) -> Poly:
    if p.is_zero():
        raise DomainError("zero polynomial has no isolated roots")
    g = poly_gcd(p, p.derivative()) if p.degree > 0 else Poly((1,))
    q = p if g.degree <= 0 else p.exact_div(g)
    return q.primitive() if q.degree >= 0 else q


def count_real_roots(p: Poly, lo: Number | None = None, hi: Number | None = None) -> int:
    """Distinct real roots in (lo, hi]; None means the corresponding infinity."""
    q = squarefree(p)
    seq = sturm_sequence(q)
    a = _signs_at_infinity(seq, False) if lo is None else _signs_at(seq, lo)
    b = _signs_at_infinity(seq, True) if hi is None else _signs_at(seq, hi)
    return a - b


def root_bound(p: Poly) -> Fraction:
    """Cauchy bound: every root has absolute value below it."""
    lc = abs(Fraction(p.lc))
    m = max((abs(Fraction(c)) for c in p.coeffs[:-1]), default=Fraction(0))
    b = 1 + m / lc
    # round up to a power of two so bisection points stay dyadic
    k = math.ceil(b)
    return Fraction(1 << (k - 1).bit_length()) if k > 1 else Fraction(2)


def isolate_real_roots(p: Poly) -> list[RealInterval]:
    """Disjoint intervals, each holding exactly one real root, ascending."""
    q = squarefree(p)
    if q.degree <= 0:
        return []
    seq = sturm_sequence(q)
    B = root_bound(q)
    out: list[RealInterval] = []
    stack = [(-B, B, _signs_at(seq, -B), _signs_at(seq, B))]
    while stack:
        a, b, va, vb = stack.pop()
        n = va - vb
        if n == 0:
            continue
        if n == 1:
            out.append(RealInterval(a, b))
            continue
        m = (a + b) / 2
        vm = _signs_at(seq, m)
        if q(m) == 0:
            out.append(RealInterval(m, m))
            # roots in (a, m) and (m, b): shrink around m so it is not recounted
            eps = (b - a) / 4
            while count_real_roots(q, m - eps, m + eps) != 1 or q(m - eps) == 0 or q(m + eps) == 0:
                eps /= 2
            stack.append((a, m - eps, va, _signs_at(seq, m - eps)))
            stack.append((m + eps, b, _signs_at(seq, m + eps), vb))
            continue
        stack.append((a, m, va, vm))
        stack.append((m, b, vm, vb))
    out.sort(key=lambda iv: iv.lo)
    return out


class _IntEval:
    """p(x) * den(x)^deg(p) as an integer; same sign as p(x), no Fraction gcds."""

    def __init__(self, p: Poly):
        den = 1
        for v in p.coeffs:
            den = den * Fraction(v).denominator // math.gcd(den, Fraction(v).denominator)
        self.c = [int(Fraction(v) * den) for v in p.coeffs]

    def __call__(self, x: Fraction) -> int:
        num, den = x.numerator, x.denominator
        acc = 0
        dpow = 1
        for v in reversed(self.c):
            acc = acc * num + v * dpow
            dpow *= den
        return acc


def refine_root(p: Poly, iv: RealInterval, width: Fraction) -> RealInterval:
    """Shrink an isolating interval of a squarefree p below ``width``.

    Uses a Newton step from the midpoint when it lands inside and keeps the
    sign change as the certificate; falls back to bisection otherwise.
    """
    if iv.width == 0:
        return iv
    ev = _IntEval(p)
    evd = _IntEval(p.derivative())
    a, b = iv.lo, iv.hi
    fa, fb = ev(a), ev(b)
    if fa == 0:
        return RealInterval(a, a)
    if fb == 0:
        return RealInterval(b, b)
    if (fa > 0) == (fb > 0):
        raise DomainError("interval does not bracket a simple root")
    while b - a > width:
        m = (a + b) / 2
        step_ok = False
        pm = ev(m)
        if pm == 0:
            return RealInterval(m, m)
        dm = evd(m)
        if dm != 0:
            x = m - Fraction(pm, dm * m.denominator)
            if a < x < b:
                # quadratic convergence guess first, then a cautious one
                for w in (max((b - a) ** 2 * 1024, width / 4), (b - a) / 1024):
                    if w >= (b - a) / 2:
                        continue
                    k = max(0, 2 - _exp_for(w, 0))
                    lo = Fraction(math.floor(x * (1 << k)) - math.ceil(w * (1 << k)), 1 << k)
                    hi = Fraction(math.ceil(x * (1 << k)) + math.ceil(w * (1 << k)), 1 << k)
                    lo, hi = max(lo, a), min(hi, b)
                    if hi - lo > (b - a) / 2:
                        continue
                    flo, fhi = ev(lo), ev(hi)
                    if flo == 0:
                        return RealInterval(lo, lo)
                    if fhi == 0:
                        return RealInterval(hi, hi)
                    if (flo > 0) != (fhi > 0):
                        a, b, fa, fb = lo, hi, flo, fhi
                        step_ok = True
                        break
        if not step_ok:
            if (pm > 0) == (fa > 0):
                a, fa = m, pm
            else:
                b, fb = m, pm
    return RealInterval(a, b)


class RealRoots:
    """Cached isolating intervals of a squarefree polynomial, refinable on demand."""

    def __init__(self, p: Poly):
        self.poly = squarefree(p)
        self.intervals = isolate_real_roots(self.poly)

    def __len__(self):
        return len(self.intervals)

    def at_width(self, width: Fraction) -> list[RealInterval]:
        self.intervals = [refine_root(self.poly, iv, width) for iv in self.intervals]
        return list(self.intervals)

    def at_bits(self, bits: int) -> list[RealInterval]:
        return self.at_width(Fraction(1, 1 << bits))


def embed(coeffs: Sequence[Number], root: RealInterval, prec: int | None = None) -> RealInterval:
    """Evaluate sum c_i * root^i over the interval."""
    return eval_interval(Poly(coeffs), root, prec)


def certified_sign(coeffs: Sequence[Number], roots: RealRoots, index: int, start_bits: int = 32, max_bits: int = 1 << 16) -> int:
    """Sign of the polynomial expression at one real root, refining until decided."""
    bits = start_bits
    poly = Poly(coeffs)
    if poly.is_zero():
        return 0
    while bits <= max_bits:
        iv = roots.at_bits(bits)[index]
        s = eval_interval(poly, iv).sign()
        if s is not None and s != 0:
            return s
        if s == 0:
            return 0
        # exact zero check at a rational root
        if iv.width == 0 and poly(iv.lo) == 0:
            return 0
        bits *= 2
    raise ArithmeticError("sign could not be resolved")
