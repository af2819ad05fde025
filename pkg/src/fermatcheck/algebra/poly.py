"""Dense univariate and bivariate polynomials with exact coefficients.

Univariate polynomials store coefficients in ascending degree order.  Integer
coefficients are kept as ``int``; anything else is a :class:`fractions.Fraction`.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence, Union

from ..errors import DomainError

Number = Union[int, Fraction]


def _norm(c: Number) -> Number:
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def _trim(coeffs: Iterable[Number]) -> tuple:
    out = [_norm(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


class Poly:
    """Immutable univariate polynomial over Q (integers kept exact as ``int``)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number] = ()):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # constructors -----------------------------------------------------
    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def constant(cls, c: Number) -> "Poly":
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Sequence[Number]) -> "Poly":
        p = cls((1,))
        for r in roots:
            p = p * cls((-r, 1))
        return p

    # basic properties -------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Number:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def __getitem__(self, i: int) -> Number:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _trim((other,))
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({list(self.coeffs)})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            if mono and c == 1:
                s = mono
            elif mono and c == -1:
                s = "-" + mono
            else:
                s = f"{c}*{mono}" if mono else str(c)
                if mono and isinstance(c, Fraction):
                    s = f"({c})*{mono}"
            terms.append(s)
        return " + ".join(terms).replace("+ -", "- ")

    # arithmetic -------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise DomainError("negative polynomial power")
        result, base = Poly((1,)), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: Number) -> "Poly":
        return Poly(c * a for a in self.coeffs)

    def __divmod__(self, other: "Poly"):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        lcb = other.lc
        if len(rem) - 1 < db:
            return Poly(), self
        quo = [0] * (len(rem) - db)
        exact_int = isinstance(lcb, int) and abs(lcb) == 1
        for k in range(len(rem) - 1 - db, -1, -1):
            c = rem[k + db]
            if c == 0:
                continue
            q = c * lcb if exact_int else Fraction(c) / lcb
            quo[k] = q
            for j, bj in enumerate(other.coeffs):
                rem[k + j] -= q * bj
        return Poly(quo), Poly(rem[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise DomainError("polynomial division is not exact")
        return q

    # calculus / evaluation ---------------------------------------------
    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Poly":
        return Poly(i * c for i, c in enumerate(self.coeffs) if i)

    def compose(self, other: "Poly") -> "Poly":
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lc = self.lc
        return Poly(Fraction(c) / lc for c in self.coeffs)

    def content(self) -> Fraction:
        """Positive rational c with self / c primitive integral."""
        if self.is_zero():
            return Fraction(0)
        nums = [Fraction(c).numerator for c in self.coeffs]
        dens = [Fraction(c).denominator for c in self.coeffs]
        return Fraction(reduce(gcd, nums), reduce(lcm, dens))

    def primitive(self) -> "Poly":
        """Integral primitive part with positive leading coefficient."""
        if self.is_zero():
            return self
        c = self.content()
        if self.lc < 0:
            c = -c
        return Poly(Fraction(a) / c for a in self.coeffs)

    def reversed(self, degree: int | None = None) -> "Poly":
        """X^degree * P(1/X)."""
        n = self.degree if degree is None else degree
        if n < self.degree:
            raise DomainError("reversal degree below polynomial degree")
        coeffs = list(self.coeffs) + [0] * (n - self.degree)
        return Poly(reversed(coeffs))


def IntPoly(coeffs: Iterable[int]) -> Poly:
    """Build a polynomial whose coefficients must all be integers."""
    coeffs = list(coeffs)
    for c in coeffs:
        if isinstance(c, Fraction) and c.denominator != 1:
            raise DomainError(f"non-integral coefficient {c}")
        if not isinstance(c, (int, Fraction)):
            raise TypeError(f"unsupported coefficient type {type(c).__name__}")
    return Poly(coeffs)


def RatPoly(coeffs: Iterable[Number | str]) -> Poly:
    return Poly(Fraction(c) for c in coeffs)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over Q."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_part(p: Poly) -> Poly:
    if p.degree <= 0:
        return p
    g = poly_gcd(p, p.derivative())
    return (p // g).primitive()


# ---------------------------------------------------------------------------
# determinants and resultants


def bareiss_det(matrix: Sequence[Sequence]) -> int:
    """Fraction-free Gaussian elimination over any exact integral domain.

    Works for ``int`` entries and for :class:`Poly` entries (exact division in
    Z[Y]).  Returns the determinant in the entry ring.
    """
    n = len(matrix)
    if n == 0:
        return 1
    m = [list(row) for row in matrix]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return m[k][k] * 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * pivot - m[i][k] * m[k][j]
                if isinstance(num, Poly):
                    m[i][j] = num.exact_div(prev) if isinstance(prev, Poly) else num.exact_div(Poly((prev,)))
                else:
                    q, r = divmod(num, prev)
                    if r:
                        raise ArithmeticError("Bareiss step not exact; matrix entries must be integers")
                    m[i][j] = q
        prev = pivot
    det = m[n - 1][n - 1]
    return -det if sign < 0 else det


def fraction_det(matrix: Sequence[Sequence[Number]]) -> Fraction:
    """Determinant over Q by clearing denominators and running Bareiss."""
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    dens = [reduce(lcm, (Fraction(x).denominator for x in row), 1) for row in matrix]
    scaled = [[int(Fraction(x) * d) for x in row] for row, d in zip(matrix, dens)]
    total = reduce(lambda a, b: a * b, dens, 1)
    return Fraction(bareiss_det(scaled), total)


def sylvester_matrix(p: Poly, q: Poly) -> list[list]:
    m, n = p.degree, q.degree
    size = m + n
    rows = []
    pc = list(reversed(p.coeffs))
    qc = list(reversed(q.coeffs))
    for i in range(n):
        rows.append([0] * i + pc + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + qc + [0] * (size - n - 1 - i))
    return rows


def sylvester_resultant(p: Poly, q: Poly) -> Number:
    """Res(p, q) as the Sylvester determinant; used as an independent check."""
    if p.is_zero() or q.is_zero():
        raise DomainError("resultant of the zero polynomial")
    if p.degree == 0 and q.degree == 0:
        return 1
    rows = sylvester_matrix(p, q)
    if p.is_integral() and q.is_integral():
        return bareiss_det(rows)
    return _norm(fraction_det(rows))


def resultant(p: Poly, q: Poly) -> Number:
    """Res(p, q) = lc(p)^deg(q) * prod q(root) over the roots of p.

    Computed by the Euclidean remainder sequence over Q.
    """
    if p.is_zero() or q.is_zero():
        raise DomainError("resultant of the zero polynomial")
    acc: Number = 1
    a, b = p, q
    while True:
        m, n = a.degree, b.degree
        if n == 0:
            return _norm(Fraction(acc) * Fraction(b.lc) ** m)
        if m == 0:
            return _norm(Fraction(acc) * Fraction(a.lc) ** n)
        r = a % b
        if r.is_zero():
            return 0
        # Res(a, b) = (-1)^(mn) lc(b)^(m - deg r) Res(b, r)
        if (m * n) % 2:
            acc = -acc
        acc = acc * Fraction(b.lc) ** (m - r.degree)
        a, b = b, r


def discriminant(p: Poly) -> Number:
    n = p.degree
    if n < 1:
        raise DomainError("discriminant needs positive degree")
    r = resultant(p, p.derivative())
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return _norm(Fraction(sign * r) / p.lc)


# ---------------------------------------------------------------------------
# bivariate polynomials


class BiPoly:
    """Polynomial in X and Y with integer coefficients.

    ``grid[i][j]`` is the coefficient of X^i Y^j.
    """

    __slots__ = ("grid",)

    def __init__(self, grid: Sequence[Sequence[int]]):
        rows = [list(r) for r in grid]
        for r in rows:
            while r and r[-1] == 0:
                r.pop()
        while rows and not rows[-1]:
            rows.pop()
        width = max((len(r) for r in rows), default=0)
        object.__setattr__(self, "grid", tuple(tuple(r + [0] * (width - len(r))) for r in rows))

    def __setattr__(self, name, value):
        raise AttributeError("BiPoly is immutable")

    @classmethod
    def homogenize(cls, h: Poly) -> "BiPoly":
        """G(X, Y) = X^t H(Y/X) for H of degree t."""
        t = h.degree
        grid = [[0] * (t + 1) for _ in range(t + 1)]
        for k, c in enumerate(h.coeffs):
            grid[t - k][k] = int(c)
        return cls(grid)

    @property
    def deg_x(self) -> int:
        return len(self.grid) - 1

    @property
    def deg_y(self) -> int:
        return max((len(r) - 1 for r in self.grid if any(r)), default=-1)

    def is_zero(self) -> bool:
        return not self.grid

    def at_y(self, y: Number) -> Poly:
        """Specialise Y to a number, giving a polynomial in X."""
        return Poly(Poly(row)(y) for row in self.grid)

    def as_poly_in_x(self) -> list[Poly]:
        """Coefficients (in X) as polynomials in Y."""
        return [Poly(row) for row in self.grid]

    def __eq__(self, other):
        return isinstance(other, BiPoly) and self.grid == other.grid

    def __hash__(self):
        return hash(self.grid)

    def __repr__(self):
        return f"BiPoly({[list(r) for r in self.grid]})"


def interpolate(xs: Sequence[Number], ys: Sequence[Number]) -> Poly:
    """Newton interpolation through the points (xs[i], ys[i])."""
    n = len(xs)
    coef = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    result = Poly((coef[-1],))
    for i in range(n - 2, -1, -1):
        result = result * Poly((-xs[i], 1)) + coef[i]
    return result


def resultant_in_x(p: Poly, g: BiPoly) -> Poly:
    """Res_X(p(X), g(X, Y)) as a polynomial in Y.

    Evaluation at integer points Y = y where the X-leading coefficient of g does
    not vanish, univariate exact resultants, then Newton interpolation.
    """
    if p.is_zero() or g.is_zero():
        raise DomainError("resultant of the zero polynomial")
    if g.deg_x <= 0:
        raise DomainError("G must have positive degree in X")
    m, n = p.degree, g.deg_x
    if m == 0:
        return Poly((int(p.lc),)) ** n
    bound = m * max(g.deg_y, 0)
    lead = g.as_poly_in_x()[-1]
    xs, ys = [], []
    y = 0
    while len(xs) < bound + 1:
        if lead(y) != 0:
            xs.append(y)
            ys.append(resultant(p, g.at_y(y)))
        y += 1
    out = interpolate(xs, ys)
    if not out.is_integral():
        raise ArithmeticError("interpolated resultant has non-integral coefficients")
    return out


def resultant_in_x_sylvester(p: Poly, g: BiPoly) -> Poly:
    """Direct Sylvester determinant over Z[Y]; slow, used to cross-check."""
    if p.is_zero() or g.is_zero():
        raise DomainError("resultant of the zero polynomial")
    m, n = p.degree, g.deg_x
    size = m + n
    gx = [Poly(row) for row in g.grid]
    pc = [Poly((c,)) for c in reversed(p.coeffs)]
    gc = list(reversed(gx))
    zero = Poly()
    rows = []
    for i in range(n):
        rows.append([zero] * i + pc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + gc + [zero] * (size - n - 1 - i))
    det = bareiss_det(rows)
    return det if isinstance(det, Poly) else Poly((det,))
