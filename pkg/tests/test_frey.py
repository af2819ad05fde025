from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import FS3, FS4, K148, K2, K404
from fermatcheck.dataio import load_field
from fermatcheck.errors import DomainError
from fermatcheck.frey import (
    BadReductionError,
    aq_of_curve,
    curve_invariants,
    frey_from_powers,
    frey_invariants,
    frey_j_valuation_formula,
    fs_witness_check,
    is_L_unit,
    j_valuation_closed_form,
    j_valuation_from_invariants,
    j_valuation_from_lambda,
    j_valuation_rational,
    lemma14_chain,
    normalize_solution,
    power_residue_pairs,
    uniformizer,
)
from fermatcheck.numberfield import dedekind_factor, v_L

ADMISSIBLE_79 = sorted([(1, 23), (1, 55), (23, 1), (23, 55), (24, 56), (24, 78), (55, 1),
                        (55, 23), (56, 24), (56, 78), (78, 24), (78, 56)])

coords3 = st.lists(st.integers(-9, 9), min_size=3, max_size=3)
coords4 = st.lists(st.integers(-4, 4), min_size=4, max_size=4)


def test_invariants_over_q_match_hand_values():
    # y^2 = x(x - 1)(x + 1): c4 = 48, c6 = 0, Delta = 64
    Q = load_field("1.1.1.1")
    c4, c6, disc = curve_invariants(Q(1), Q(1))
    assert (c4, c6, disc) == (Q(48), Q(0), Q(64))
    inv = frey_invariants(Q, 3, 5, -8, 1)
    assert inv.identity_holds()
    # c4 = 16*49, c6 = 32*(-2)*11*13, Delta = 16*120^2
    assert inv.valuations() == (4, 6, 10)


@settings(max_examples=200)
@given(coords3, coords3)
def test_discriminant_identity(a, b):
    K = load_field(K404)
    s, t = K.element(a), K.element(b)
    if s.is_zero() or t.is_zero() or (s + t).is_zero():
        with pytest.raises(DomainError):
            frey_from_powers(K, s, t)
        return
    assert frey_from_powers(K, s, t).identity_holds()


def test_rejects_bad_triples():
    K = load_field(K148)
    with pytest.raises(DomainError):
        frey_invariants(K, 1, 1, 1, 3)
    with pytest.raises(DomainError):
        frey_invariants(K, 2, -2, 0, 3)
    Q = load_field("1.1.1.1")
    with pytest.raises(DomainError):
        frey_invariants(Q, 3, 3, -6, 1)  # common factor 3


@settings(max_examples=25)
@given(coords4.filter(any), coords4, st.integers(1, 3))
def test_normalisation_identity_on_k2(odd, unit_part, k):
    K = load_field(K2)
    pi = uniformizer(K)
    a = 2 * K.element(odd) + 1
    b = pi**k * (2 * K.element(unit_part) + 1)
    rep = normalize_solution(K, a, b, None, 17, ray_class_checked=True)
    assert rep.w_integral
    assert rep.multiplicative and rep.v_c4_W == 0
    assert rep.v_disc_W == 2 * 17 * rep.v_abc - 8 * K.d
    assert rep.formula_holds


def test_normalisation_guards():
    K = load_field(K2)
    with pytest.raises(DomainError):
        normalize_solution(K, 1, 2, None, 13)
    with pytest.raises(DomainError):
        normalize_solution(K, 1, 3, None, 17, ray_class_checked=True)  # nothing divisible by L


def test_valuation_chain_at_13():
    K = load_field(K2)
    pi = uniformizer(K)
    rep = lemma14_chain(K, K(3), pi)
    assert (rep.initial, rep.scaled, rep.possibly_reduced) == ((16, 24, 42), (8, 12, 18), (4, 6, 6))
    assert rep.w_integral
    assert rep.v_j == 3 * 16 - 42
    with pytest.raises(DomainError):
        lemma14_chain(K, K(3), pi**2)


@settings(max_examples=60)
@given(st.integers(-200, 200), st.integers(1, 200))
def test_j_valuation_routes_agree(num, den):
    K = load_field(K2)
    lam = K(Fraction(num, den))
    if lam.is_zero() or (lam - 1).is_zero() or (1 - lam * (1 - lam)).is_zero():
        return
    direct = j_valuation_from_lambda(K, lam)
    inv = frey_from_powers(K, K(1) - lam, lam)  # x(x - (1 - lam))(x + lam), same j up to translation
    assert direct == j_valuation_from_invariants(inv)
    if max(abs(v_L(K, lam)), abs(v_L(K, 1 - lam))) > 0:
        assert direct == j_valuation_closed_form(K, lam)


def test_j_valuation_formula():
    assert frey_j_valuation_formula(4, 17, 1) == 32 - 34


def test_x0_17_annotations():
    K = load_field(K2)
    assert j_valuation_rational(K, Fraction(-17 * 373**3, 2**17)) == -68
    assert j_valuation_rational(K, Fraction(-(17**2) * 101**3, 2)) == -4


def test_fs_witnesses():
    K = load_field(FS3)
    w = fs_witness_check(K, 16 * K.alpha)
    assert w.in_S and w.norm_a == -(2**13) and w.norm_b == 1
    assert w.v_a == 13 and w.violates_fs
    assert w.w_integral and w.v_c4_W == 0 and w.v_disc_W > 0
    K4 = load_field(FS4)
    x = K4.alpha
    w4 = fs_witness_check(K4, 16 * (1 + x) ** 2 * (4 + 4 * x + x**2))
    assert w4.in_S and w4.v_a == 18 and w4.violates_fs
    assert w4.w_integral and w4.v_c4_W == 0 and w4.v_disc_W > 0
    Q = load_field("1.1.1.1")
    assert not fs_witness_check(Q, 2).violates_fs
    assert not fs_witness_check(Q, 3).in_S
    assert is_L_unit(Q, Q(Fraction(1, 8))) and not is_L_unit(Q, Q(6))


def test_power_residues_mod_79():
    K = load_field(K2)
    primes = dedekind_factor(K, 79)
    assert len(primes) == 4
    for q in primes:
        res, pairs = power_residue_pairs(q, 13)
        assert res == [1, 23, 24, 55, 56, 78]
        assert sorted(pairs) == ADMISSIBLE_79
        assert {aq_of_curve(s, t, q) for s, t in pairs} <= {-4, 4}


def test_bad_reduction_branch():
    K = load_field(K404)
    q = dedekind_factor(K, 7)[0]
    with pytest.raises(BadReductionError) as err:
        aq_of_curve(7, 1, q)
    assert err.value.candidates == (-8, 8)
    assert err.value.exit_code == 2
