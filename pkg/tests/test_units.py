import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import K148, K2, K3, K404, K564, QUINTIC, SEXTIC, SQRT2
from fermatcheck.dataio import load_field
from fermatcheck.errors import ConfigurationError, DomainError
from fermatcheck.numberfield import dedekind_factor
from fermatcheck.units import (
    UnitCertificate,
    find_normalizing_unit,
    h_tower,
    narrow_class_number,
    narrow_class_report,
    rk_multiple,
    ray_class_number,
    strip_small_primes,
    theorem17_check,
    tower_poly,
    tower_value_by_intervals,
)
from fermatcheck.numberfield import quotient_mod4

# PARI/GP: bnrinit(bnf, [m, inf]).no
PARI_RAY = [
    (K148, 37, True, 2),
    (K404, 101, True, 2),
    (K564, 47, True, 2),
    (K148, 37, False, 1),
]
PARI_RAY_4 = {K2: (1, 16), K3: (1, 256), SQRT2: (1, 4), K148: (1, 8), "2.2.12.1": (2, 4)}
# narrow class numbers 2 for these cubic fields in which 2 is totally ramified
PARI_HPLUS_TWO = ["3.3.788.1", "3.3.1076.1", "3.3.1396.1", "3.3.1492.1", "3.3.1556.1", "3.3.1940.1"]


def unit_power(K, exps):
    u = K.one
    for e, fu in zip(exps, K.fundamental_units):
        u = u * (fu**e if e >= 0 else fu.inverse() ** (-e))
    return u


def numeric_tower(u, n):
    roots = np.roots([float(c) for c in reversed(u.H.coeffs)]).real
    prods = np.array([1.0])
    for _ in range(n):
        prods = np.outer(prods, roots).ravel()
    return float(np.prod(1 - prods))


@settings(max_examples=30)
@given(st.lists(st.integers(-3, 3), min_size=2, max_size=2))
def test_first_level_is_norm_of_one_minus_u(exps):
    K = load_field(K404)
    eps = unit_power(K, exps)
    c = UnitCertificate.of(K, eps * eps)
    assert c.totally_positive
    (lv,) = h_tower(c, 1)
    assert lv.value == (K.one - eps * eps).norm()


@settings(max_examples=15)
@given(st.lists(st.integers(-2, 2), min_size=2, max_size=2))
def test_second_level_matches_float_product(exps):
    K = load_field(K148)
    eps = unit_power(K, exps)
    c = UnitCertificate.of(K, eps * eps)
    lv = h_tower(c, 2)[1]
    approx = numeric_tower(c, 2)
    assert math.isclose(lv.value, approx, rel_tol=1e-6, abs_tol=1e-3)
    assert tower_value_by_intervals(c.H, 2) == lv.value
    assert tower_poly(c.H, 2)(1) == lv.value


def test_tower_rejects_non_totally_positive():
    K = load_field(K404)
    u = K.fundamental_units[0]
    c = UnitCertificate.of(K, u)
    if not c.totally_positive:
        with pytest.raises(DomainError):
            h_tower(c, 1)
    with pytest.raises(DomainError):
        UnitCertificate.of(K, K(2))


def test_rk_depth_bounds():
    K = load_field(K2)
    certs = [UnitCertificate.of(K, u) for _, u in K.rk_units]
    with pytest.raises(DomainError):
        rk_multiple(certs, K.d, 3)
    with pytest.raises(DomainError):
        rk_multiple([], K.d)
    cert = rk_multiple(certs, K.d)
    assert cert.A == [4, 2**16 * 17]
    assert cert.certifies(19, K.disc) and not cert.certifies(17, K.disc)


def test_strip_small_primes():
    assert strip_small_primes(2**5 * 3 * 607 * 613, 607) == 613
    assert strip_small_primes(-12, 3) == 1
    assert strip_small_primes(0, 10) == 0


@pytest.mark.parametrize("label,p,inf,expected", PARI_RAY)
def test_ray_class_at_ramified_prime(label, p, inf, expected):
    K = load_field(label)
    P = [q for q in dedekind_factor(K, p) if q.e == 2][0]
    assert ray_class_number(K, P, include_all_infinite=inf).ray_class_number == expected


@pytest.mark.parametrize("label", sorted(PARI_RAY_4))
def test_ray_class_mod_four(label):
    K = load_field(label)
    finite, full = PARI_RAY_4[label]
    assert ray_class_number(K, "4O_K").ray_class_number == finite
    assert ray_class_number(K, "4O_K", include_all_infinite=True).ray_class_number == full


def test_ray_class_of_unit_modulus_is_narrow_class_number():
    for label in (K148, "2.2.12.1", "3.3.788.1"):
        K = load_field(label)
        assert ray_class_number(K, "O_K", include_all_infinite=True).ray_class_number == narrow_class_number(K)
        assert ray_class_number(K, "O_K").ray_class_number == K.h


@pytest.mark.parametrize("label", PARI_HPLUS_TWO)
def test_narrow_class_two(label):
    K = load_field(label)
    rep = narrow_class_report(K)
    assert rep.h_plus == 2
    v = theorem17_check(K)
    assert not v.passes and not v.ray_class_field_trivial and v.corollary_consistent


@pytest.mark.parametrize("label", [K148, K404, K564, QUINTIC, SEXTIC, K2, SQRT2])
def test_narrow_one_iff_trivial_ray_class_field(label):
    K = load_field(label)
    v = theorem17_check(K)
    assert v.passes and v.ray_class_field_trivial
    assert v.G_mod_squares == 2**K.d


def test_narrow_class_needs_full_unit_group():
    K = load_field(K148)
    from fermatcheck.numberfield import NumberField

    bare = NumberField("bare", K.min_poly, K.basis, class_number=1)
    with pytest.raises(ConfigurationError):
        narrow_class_report(bare)


@settings(max_examples=40)
@given(st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_normalizing_unit(coords):
    K = load_field(K404)
    a = K.element(coords) * 2 + 1  # odd element
    if a.norm() == 0:
        return
    eps = find_normalizing_unit(K, a)
    assert abs(eps.norm()) == 1
    R = quotient_mod4(K)
    assert R.mul1(R.encode(eps), R.encode(-a)) == R.encode(K.one)
