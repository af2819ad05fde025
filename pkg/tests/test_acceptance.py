"""Acceptance checks, one group per criterion.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion.  ``python tests/test_acceptance.py`` does the same.
"""

import random
from fractions import Fraction
from functools import lru_cache

import pytest
from sympy import factorint

from conftest import FS3, FS4, K148, K2, K3, K404, K564, QUINTIC, SEXTIC, SQRT2
from fermatcheck.dataio import FixtureStore, load_field, load_newforms
from fermatcheck.frey import (
    aq_of_curve,
    frey_from_powers,
    fs_witness_check,
    j_valuation_rational,
    lemma14_chain,
    normalize_solution,
    power_residue_pairs,
    uniformizer,
)
from fermatcheck.numberfield import dedekind_factor, quotient_mod4
from fermatcheck.obstruction import a_q_set, b_fq, condition_c_scan
from fermatcheck.units import (
    UnitCertificate,
    h_tower,
    narrow_class_report,
    ray_class_number,
    rk_multiple,
    strip_small_primes,
)

STORE = FixtureStore()
LISTED_CUBICS = [148, 404, 564, 756, 788, 1076, 1300, 1396, 1492, 1524, 1556, 1620, 1940]


def tagged(tag):
    return [l for l in STORE.field_labels() if tag in (STORE.field_blob(l).get("tags") or [])]


@lru_cache(maxsize=None)
def tower(label, unit_index, depth):
    K = load_field(label)
    return [lv.value for lv in h_tower(UnitCertificate.of(K, K.rk_units[unit_index][1]), depth)]


# 1 ------------------------------------------------------------------ H tower


@pytest.mark.parametrize("label,expected", [(K148, 4), (K404, 12), (K564, 2**2 * 3**3)])
def test_criterion_01_cubic_first_level(label, expected):
    assert tower(label, 0, 1) == [expected]


def test_criterion_01_quintic():
    assert tower(QUINTIC, 0, 1) == [-12]
    from math import gcd

    assert gcd(tower(QUINTIC, 0, 2)[1], tower(QUINTIC, 1, 2)[1]) == 2**12 * 3 * 5**2


def test_criterion_01_sextic():
    u1 = tower(SEXTIC, 0, 3)
    u2 = tower(SEXTIC, 1, 3)
    assert u1[0] == 16
    assert u1[1] == 2**32 * 5**4
    assert u2[2] == 2**216 * 7**54


def test_criterion_01_k2():
    assert tower(K2, 0, 2) == [4, 2**16 * 17]


# 2 ------------------------------------------------------------------ K3 certificate


def test_criterion_02_k3_certificate():
    K = load_field(K3)
    cert = rk_multiple([UnitCertificate.of(K, u) for _, u in K.rk_units], K.d)
    assert cert.conclusive and cert.depth == 4
    assert strip_small_primes(cert.R_multiple, 607) == 1
    assert max(factorint(cert.R_multiple)) <= 607


# 3 ------------------------------------------------------------------ obstruction norms


def test_criterion_03_norms():
    assert b_fq(load_newforms(K404)[0][0], (7, 1, 0)).norm == -(2**5) * 3**2 * 5 * 7
    assert b_fq(load_newforms(K564)[0][0], (3, 1, None)).norm == -(3**6)
    assert b_fq(load_newforms(QUINTIC)[0][0], (3, 1, 0)).norm == -(3**5) * 17


def test_criterion_03_aq_sets():
    assert a_q_set(7) == [-4, 0, 4]
    assert a_q_set(3) == [0]


# 4 ------------------------------------------------------------------ splittings


def shape(label, p):
    return sorted((q.e, q.f) for q in dedekind_factor(load_field(label), p))


def test_criterion_04_splittings():
    assert shape(K404, 3) == [(1, 1), (1, 2)]
    assert shape(K148, 37) == [(1, 1), (2, 1)]
    assert shape(K404, 101) == [(1, 1), (2, 1)]
    assert shape(K2, 79) == [(1, 1)] * 4
    assert shape(K3, 31) == [(1, 1)] * 8
    assert shape(K3, 97) == [(1, 1)] * 8


def test_criterion_04_two_totally_ramified_on_table_fields():
    labels = tagged("table-narrow-one")
    assert len(labels) >= 80
    bad = [l for l in labels if not load_field(l).two_totally_ramified]
    assert bad == []


# 5 ------------------------------------------------------------------ ray classes


@pytest.mark.parametrize("label,p", [(K148, 37), (K404, 101), (K564, 47)])
def test_criterion_05_ramified_prime(label, p):
    K = load_field(label)
    (P,) = [q for q in dedekind_factor(K, p) if q.e == 2]
    assert ray_class_number(K, P, include_all_infinite=True).ray_class_number == 2


@pytest.mark.parametrize("label", [K2, K3, SQRT2])
def test_criterion_05_mod_four(label):
    assert ray_class_number(load_field(label), "4O_K").ray_class_number == 1


# 6 ------------------------------------------------------------------ residues mod 79


def test_criterion_06_residues_mod_79():
    pairs_expected = sorted([(1, 23), (1, 55), (23, 1), (23, 55), (24, 56), (24, 78), (55, 1),
                             (55, 23), (56, 24), (56, 78), (78, 24), (78, 56)])
    K = load_field(K2)
    qs = dedekind_factor(K, 79)
    assert len(qs) == 4
    for q in qs:
        res, pairs = power_residue_pairs(q, 13)
        assert res == [1, 23, 24, 55, 56, 78]
        assert sorted(pairs) == pairs_expected
        assert {aq_of_curve(s, t, q) for s, t in pairs} <= {-4, 4}


# 7 ------------------------------------------------------------------ (FS) witnesses


def test_criterion_07_cubic_witness():
    K = load_field(FS3)
    w = fs_witness_check(K, 16 * K.alpha)
    assert w.in_S and w.norm_a == -(2**13) and w.norm_b == 1
    assert w.v_a == 13 > 12 == w.threshold
    assert w.w_integral and w.v_c4_W == 0 and w.v_disc_W > 0


def test_criterion_07_quartic_witness():
    K = load_field(FS4)
    x = K.alpha
    w = fs_witness_check(K, 16 * (1 + x) ** 2 * (4 + 4 * x + x**2))
    assert w.in_S and w.v_a == 18 > 16 == w.threshold
    assert w.w_integral and w.v_c4_W == 0 and w.v_disc_W > 0


# 8 ------------------------------------------------------------------ condition (C)


def test_criterion_08_empty_148():
    rep = condition_c_scan(load_newforms(K148)[0])
    assert rep.count == 0 and rep.verdict == "satisfied (vacuous)"


def test_criterion_08_witness_404():
    rep = condition_c_scan(load_newforms(K404)[0])
    assert rep.verdict == "satisfied (witness)"
    w = rep.forms[0].witness
    assert w["a_q"] == -2 and w["p"] == 7


def test_criterion_08_witness_564():
    assert condition_c_scan(load_newforms(K564)[0]).satisfied


@pytest.mark.parametrize("disc", LISTED_CUBICS)
def test_criterion_08_listed_cubics(disc):
    # fields without a bundled newform table raise DataGapError here
    forms, _ = load_newforms(f"3.3.{disc}.1", offline=True)
    assert condition_c_scan(forms).satisfied


def test_criterion_08_k3():
    rep = condition_c_scan(load_newforms(K3)[0])
    assert rep.count == 40 and rep.rational_count == 0


# 9 ------------------------------------------------------------------ Frey and Legendre properties


def test_criterion_09_discriminant_identity():
    rng = random.Random(20240601)
    fields = [load_field(l) for l in (K148, K404, K2, QUINTIC)]
    done = 0
    while done < 1000:
        K = rng.choice(fields)
        s = K.element([rng.randint(-50, 50) for _ in range(K.d)])
        t = K.element([rng.randint(-50, 50) for _ in range(K.d)])
        if s.is_zero() or t.is_zero() or (s + t).is_zero():
            continue
        assert frey_from_powers(K, s, t).identity_holds()
        done += 1


def test_criterion_09_normalised_valuation_identity():
    rng = random.Random(17)
    K = load_field(K2)
    pi = uniformizer(K)
    for _ in range(100):
        a = 2 * K.element([rng.randint(-4, 4) for _ in range(4)]) + 1
        b = pi ** rng.randint(1, 4) * (2 * K.element([rng.randint(-4, 4) for _ in range(4)]) + 1)
        rep = normalize_solution(K, a, b, None, 17, ray_class_checked=True)
        assert rep.w_integral and rep.multiplicative
        assert rep.v_disc_W == 2 * 17 * rep.v_abc - 8 * K.d


def test_criterion_09_valuation_chain():
    K = load_field(K2)
    rep = lemma14_chain(K, K(3), uniformizer(K))
    assert rep.initial == (16, 24, 42) and rep.scaled == (8, 12, 18)


def test_criterion_09_units_mod_four_squares():
    for label in STORE.field_labels():
        K = load_field(label)
        if K.two_totally_ramified and K.d <= 8:
            assert quotient_mod4(K).index_of_squares == 2**K.d, label


def test_criterion_09_narrow_class_formula():
    for label in tagged("table-narrow-one"):
        rep = narrow_class_report(load_field(label))
        assert rep.h_plus == rep.h * 2 ** (rep.d - rep.rank) == 1, label


# 10 ----------------------------------------------------------------- X0(17) annotations


def test_criterion_10_x0_17():
    K = load_field(K2)
    assert j_valuation_rational(K, Fraction(-17 * 373**3, 2**17)) == -68
    assert j_valuation_rational(K, Fraction(-(17**2) * 101**3, 2)) == -4


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
