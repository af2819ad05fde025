from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import FS3, K148, K2, K3, K404, K564, QUINTIC, SEXTIC, SQRT2
from fermatcheck.algebra.poly import IntPoly
from fermatcheck.dataio import load_field
from fermatcheck.errors import ConfigurationError, DomainError, IndexObstructionError
from fermatcheck.numberfield import NumberField, dedekind_factor, quotient_mod4, reduce_mod_prime, v_L

# discriminants and (e, f) shapes frozen from PARI/GP (nfdisc, idealprimedec)
PARI_DISC = {K148: 148, K404: 404, K564: 564, QUINTIC: 126032, SEXTIC: 2803712, K2: 2048, K3: 2147483648, FS3: 130964}
PARI_SPLIT = [
    (K404, 7, [(1, 1), (1, 2)]),
    (K404, 3, [(1, 1), (1, 2)]),
    (K404, 101, [(1, 1), (2, 1)]),
    (K564, 3, [(1, 1), (2, 1)]),
    (K564, 47, [(1, 1), (2, 1)]),
    (K148, 37, [(1, 1), (2, 1)]),
    (K148, 3, [(1, 3)]),
    (QUINTIC, 3, [(1, 1), (1, 4)]),
    (QUINTIC, 7877, [(1, 3), (2, 1)]),
    (SEXTIC, 17, [(1, 1), (1, 1), (1, 2), (1, 2)]),
    (SEXTIC, 23, [(1, 1), (1, 1), (1, 2), (1, 2)]),
    (SEXTIC, 37, [(2, 2), (1, 2)]),
    (K2, 79, [(1, 1)] * 4),
    (K3, 31, [(1, 1)] * 8),
    (K3, 97, [(1, 1)] * 8),
]


def shape(primes):
    return sorted((q.e, q.f) for q in primes)


@pytest.mark.parametrize("label,disc", sorted(PARI_DISC.items()))
def test_discriminant_matches_pari(label, disc):
    assert load_field(label).disc == disc


@pytest.mark.parametrize("label,p,expected", PARI_SPLIT)
def test_splitting_matches_pari(label, p, expected):
    primes = dedekind_factor(load_field(label), p)
    assert shape(primes) == sorted(expected)
    assert [q.index for q in primes] == list(range(len(primes)))


def test_index_obstruction():
    K = load_field(SEXTIC)
    assert K.index == 232
    with pytest.raises(IndexObstructionError):
        dedekind_factor(K, 29)
    with pytest.raises(DomainError):
        dedekind_factor(K, 15)


def test_bad_descriptors_rejected():
    with pytest.raises(ConfigurationError):
        NumberField("bad", IntPoly([1, 0, 1]))  # not totally real
    with pytest.raises(ConfigurationError):
        NumberField("bad", IntPoly([-2, 0, 1]), disc=9)
    with pytest.raises(ConfigurationError):
        # (1 + sqrt 2)/2 is not integral
        NumberField("bad", IntPoly([-2, 0, 1]), [[1, 0], [Fraction(1, 2), Fraction(1, 2)]])


def test_two_totally_ramified():
    for label in (K148, K404, K564, QUINTIC, SEXTIC, K2, K3, SQRT2, "1.1.1.1"):
        assert load_field(label).two_totally_ramified, label
    assert load_field("2.2.12.1").two_totally_ramified  # 2 ramifies in Q(sqrt 3)
    K = NumberField("Q(sqrt5)", IntPoly([-1, -1, 1]))  # 2 inert
    assert not K.two_totally_ramified


coords = st.lists(st.integers(-6, 6), min_size=3, max_size=3)


@settings(max_examples=60)
@given(coords, coords)
def test_norm_multiplicative(a, b):
    K = load_field(K404)
    x, y = K.element(a), K.element(b)
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x + y).trace() == x.trace() + y.trace()


@settings(max_examples=60)
@given(coords)
def test_inverse_and_power_basis_roundtrip(a):
    K = load_field(K564)
    x = K.element(a)
    assert K.from_power(K.to_power(x.coords)) == x
    if not x.is_zero():
        assert x * x.inverse() == K.one
        assert x.minimal_polynomial().degree in (1, 3)


@settings(max_examples=60)
@given(coords.filter(any), coords.filter(any))
def test_valuation_additive(a, b):
    K = load_field(K148)
    x, y = K.element(a), K.element(b)
    assert v_L(K, x * y) == v_L(K, x) + v_L(K, y)
    assert v_L(K, 2) == K.d


@settings(max_examples=40)
@given(coords, coords)
def test_reduction_is_a_ring_map(a, b):
    K = load_field(K404)
    x, y = K.element(a), K.element(b)
    for q in dedekind_factor(K, 7):
        F = q.residue_field
        assert reduce_mod_prime(x * y, q) == F.mul(reduce_mod_prime(x, q), reduce_mod_prime(y, q))
        assert reduce_mod_prime(x + y, q) == F.add(reduce_mod_prime(x, q), reduce_mod_prime(y, q))


@pytest.mark.parametrize("label", [K148, K404, K2, SQRT2])
def test_units_mod_four(label):
    K = load_field(label)
    R = quotient_mod4(K)
    # O/4 has 4^d classes; with 2 totally ramified half of them are units
    assert R.order == 2 ** (2 * K.d - 1)
    for u in K.fundamental_units:
        assert R.is_unit(R.encode(u))
    assert R.is_unit(R.encode(K.one))
    assert not R.is_unit(R.encode(K(2)))
