from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from fermatcheck.algebra.finite_field import (
    FiniteField,
    count_points_bruteforce,
    count_points_legendre,
    factor_mod_p,
    hasse_bound_ok,
    is_irreducible_mod_p,
)
from fermatcheck.algebra.poly import (
    BiPoly,
    IntPoly,
    Poly,
    bareiss_det,
    discriminant,
    interpolate,
    poly_gcd,
    resultant,
    resultant_in_x,
    resultant_in_x_sylvester,
    sylvester_matrix,
    sylvester_resultant,
)
from fermatcheck.algebra.realroots import (
    DyadicInterval,
    RealInterval,
    certified_product,
    count_real_roots,
    isolate_real_roots,
    refine_root,
)
from fermatcheck.errors import DomainError

X = sympy.Symbol("x")
small_ints = st.integers(-20, 20)


def int_polys(min_deg=0, max_deg=6):
    return st.lists(small_ints, min_size=min_deg + 1, max_size=max_deg + 1).filter(lambda c: c[-1] != 0).map(IntPoly)


def to_sympy(p: Poly):
    return sum(sympy.Rational(c.numerator, c.denominator) * X**i if isinstance(c, Fraction) else c * X**i
               for i, c in enumerate(p.coeffs))


# ---------------------------------------------------------------- polynomials


def test_resultant_frozen_values():
    # Res(x^3 - 32x + 2, x) = (-1)^3 * 2 with the usual sign convention
    assert resultant(IntPoly([2, -32, 0, 1]), Poly.x()) == -2
    assert resultant(Poly.x(), IntPoly([2, -32, 0, 1])) == 2
    assert resultant(IntPoly([-2, 0, 1]), IntPoly([-3, 0, 1])) == 1
    assert discriminant(IntPoly([1, -3, -1, 1])) == 148
    assert discriminant(IntPoly([-1, -5, -1, 1])) == 404 * 1


def test_sympy_resultant_sign_is_not_an_oracle():
    # sympy 1.x returns +1 here; lc^3 * (-1/2)^3 = -1 is the correct value
    assert resultant(IntPoly([1, 2]), IntPoly([0, 0, 0, 1])) == -1


def _root_product(p: Poly, q: Poly) -> complex:
    roots = np.roots([float(c) for c in reversed(p.coeffs)])
    val = complex(float(p.lc)) ** q.degree
    for r in roots:
        val *= np.polyval([float(c) for c in reversed(q.coeffs)], r)
    return val


@settings(max_examples=150)
@given(int_polys(1, 5), int_polys(1, 5))
def test_resultant_matches_sylvester_and_root_product(p, q):
    r = resultant(p, q)
    assert r == sylvester_resultant(p, q)
    assert r == sympy.Matrix(sylvester_matrix(p, q)).det()
    approx = _root_product(p, q)
    assert abs(approx.real - r) <= 1e-6 * max(1.0, abs(r))


@settings(max_examples=60)
@given(int_polys(1, 5), int_polys(1, 5), int_polys(1, 3))
def test_resultant_multiplicative(p, q, r):
    assert resultant(p, q * r) == resultant(p, q) * resultant(p, r)


@settings(max_examples=80)
@given(int_polys(0, 6), int_polys(1, 4))
def test_divmod_reconstructs(a, b):
    q, r = divmod(a, b)
    assert q * b + r == a
    assert r.is_zero() or r.degree < b.degree


@settings(max_examples=60)
@given(int_polys(1, 4), int_polys(1, 4), int_polys(0, 3))
def test_gcd_contains_common_factor(a, b, c):
    g = poly_gcd(a * c, b * c)
    assert ((a * c) % g).is_zero() and ((b * c) % g).is_zero()
    if c.degree > 0:
        assert (g % c.monic()).is_zero()


@settings(max_examples=40)
@given(st.lists(st.lists(st.integers(-50, 50), min_size=4, max_size=4), min_size=4, max_size=4))
def test_bareiss_matches_numpy(m):
    assert bareiss_det(m) == round(np.linalg.det(np.array(m, dtype=float)))


@settings(max_examples=40)
@given(st.lists(small_ints, min_size=1, max_size=6))
def test_interpolation_roundtrip(coeffs):
    p = IntPoly(coeffs)
    xs = list(range(len(coeffs)))
    assert interpolate(xs, [p(x) for x in xs]) == p


@settings(max_examples=30)
@given(int_polys(1, 3), st.lists(st.lists(st.integers(-5, 5), min_size=1, max_size=3), min_size=2, max_size=3))
def test_bivariate_resultant_interpolation_vs_sylvester(p, grid):
    if all(c == 0 for c in grid[-1]):
        grid[-1][0] = 1
    g = BiPoly(grid)
    assert resultant_in_x(p, g) == resultant_in_x_sylvester(p, g)


# ---------------------------------------------------------------- finite fields


@pytest.mark.parametrize("p", [3, 5, 7, 13, 101])
@pytest.mark.parametrize("coeffs", [[1, -3, -1, 1], [-1, -5, -1, 1], [2, 0, -4, 0, 1], [2, 0, -16, 0, 20, 0, -8, 0, 1]])
def test_factor_mod_p_matches_sympy(p, coeffs):
    f = IntPoly(coeffs)
    ours = sorted((tuple(int(c) % p for c in g.coeffs), m) for g, m in factor_mod_p(f, p))
    _, ref = sympy.Poly(list(reversed(coeffs)), X, modulus=p).factor_list()
    theirs = []
    for g, m in ref:
        c = [int(v) % p for v in reversed(g.all_coeffs())]
        inv = pow(c[-1], -1, p)
        theirs.append((tuple(v * inv % p for v in c), m))
    assert ours == sorted(theirs)


@settings(max_examples=60)
@given(st.sampled_from([3, 5, 7, 11]), st.lists(st.integers(0, 10), min_size=2, max_size=6))
def test_factorisation_product(p, coeffs):
    coeffs[-1] = 1
    f = IntPoly(coeffs)
    prod = Poly((1,))
    for g, m in factor_mod_p(f, p):
        assert is_irreducible_mod_p([int(c) for c in g.coeffs], p)
        prod = prod * g**m
    diff = prod - f
    assert all(int(c) % p == 0 for c in diff.coeffs)


def test_factor_rejects_composite_modulus():
    with pytest.raises(DomainError):
        factor_mod_p(IntPoly([1, 0, 1]), 9)


@settings(max_examples=60)
@given(st.sampled_from([(3, 1), (5, 1), (7, 1), (3, 2), (5, 2), (7, 2)]), st.data())
def test_point_counts_agree(pf, data):
    p, f = pf
    F = FiniteField.prime(p) if f == 1 else FiniteField(p, IrreducibleOf(p))
    s = data.draw(st.integers(1, F.order - 1))
    t = data.draw(st.integers(1, F.order - 1))
    if F.add(s, t) == 0:
        return
    n = count_points_legendre(s, t, F)
    assert n == count_points_bruteforce(s, t, F)
    assert hasse_bound_ok(n, F.order)
    assert n % 4 == 0  # full rational 2-torsion


def IrreducibleOf(p):
    for c in range(p):
        for b in range(p):
            if is_irreducible_mod_p([c, b, 1], p):
                return (c, b, 1)


def test_legendre_rejects_singular():
    F = FiniteField.prime(7)
    with pytest.raises(DomainError):
        count_points_legendre(3, 4, F)


# ---------------------------------------------------------------- real roots


@pytest.mark.parametrize("coeffs", [[1, -3, -1, 1], [-1, -5, -1, 1], [2, 0, -4, 0, 1], [2, -32, 0, 1],
                                    [-1, 14, 15, -16, -11, 2, 1]])
def test_isolation_matches_numpy(coeffs):
    p = IntPoly(coeffs)
    ivs = isolate_real_roots(p)
    ref = sorted(r.real for r in np.roots(list(reversed(coeffs))) if abs(r.imag) < 1e-9)
    assert len(ivs) == len(ref) == count_real_roots(p)
    for iv, r in zip(sorted(ivs, key=lambda i: i.lo), ref):
        fine = refine_root(p, iv, Fraction(1, 10**12))
        assert fine.lo <= Fraction(r) + Fraction(1, 10**8) and Fraction(r) - Fraction(1, 10**8) <= fine.hi


@settings(max_examples=60)
@given(st.lists(st.integers(-30, 30), min_size=1, max_size=6, unique=True))
def test_isolation_counts_distinct_roots(roots):
    p = Poly.from_roots(roots)
    ivs = isolate_real_roots(p)
    assert len(ivs) == len(roots)
    for r in roots:
        assert sum(iv.contains(r) for iv in ivs) == 1


def test_interval_arithmetic_encloses():
    a = RealInterval(Fraction(1), Fraction(2))
    b = RealInterval(Fraction(-3), Fraction(1, 2))
    prod = a * b
    for x in (1, Fraction(3, 2), 2):
        for y in (-3, 0, Fraction(1, 2)):
            assert prod.contains(x * y)
    with pytest.raises(DomainError):
        RealInterval(Fraction(2), Fraction(1))


@settings(max_examples=40)
@given(st.lists(st.integers(-10**6, 10**6).filter(bool), min_size=1, max_size=8))
def test_certified_product_of_integers(vals):
    prec = 64 + 20 * len(vals)  # enough bits for the whole product
    prod = certified_product([DyadicInterval.from_int(v, prec) for v in vals], prec)
    exact = 1
    for v in vals:
        exact *= v
    assert prod.contains(exact)
    assert prod.nearest_integer() == exact


def test_refine_root_terminates_on_wide_root_spread():
    # charpoly of a unit square in 3.3.404.1; Newton windows used to stall here
    p = IntPoly([-1, 8624011, -964315, 1])
    want = sorted(np.roots([1, -964315, 8624011, -1]).real)
    got = [refine_root(p, iv, Fraction(1, 2**80)) for iv in isolate_real_roots(p)]
    assert len(got) == 3
    for iv, r in zip(got, want):
        assert iv.width <= Fraction(1, 2**80)
        assert abs(float(iv.lo) - r) <= 1e-6 * max(1.0, abs(r))
