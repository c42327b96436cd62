"""Tests for the class group computation of cyclic cubic fields."""

import math

import mpmath
import pytest

from tetrasieve import classgroup as CG
from tetrasieve.cubic import period_polynomial, sieve_candidates

# Class group invariants of the cubic field of conductor ell, for every
# ell < 2000 with nontrivial class group.  Produced once with PARI/GP
# (bnfinit followed by bnfcertify) and frozen here.
PARI_CYC = {
    163: [2, 2], 277: [2, 2], 313: [7], 349: [2, 2], 397: [2, 2], 547: [2, 2],
    607: [2, 2], 709: [2, 2], 853: [2, 2], 877: [7], 937: [2, 2], 1009: [2, 2],
    1063: [13], 1129: [7], 1399: [2, 2], 1459: [13], 1489: [19], 1567: [7],
    1699: [2, 2], 1777: [4, 4], 1789: [2, 2], 1831: [7], 1879: [2, 2],
    1951: [2, 2], 1987: [7],
}

# Regulator of the cubic field of conductor 7 (discriminant 49).
REGULATOR_7 = 0.5254546821


def _result(ell):
    return CG.class_group(period_polynomial(ell))


@pytest.mark.parametrize("ell", [7, 13, 19, 31, 37])
def test_small_fields_have_class_number_one(ell):
    r = _result(ell)
    assert r.h == 1 and r.invariants == []


def test_regulator_of_conductor_seven():
    r = _result(7)
    assert abs(float(r.certificate["regulator"]) - REGULATOR_7) < 1e-9
    assert abs(float(CG.analytic_hR(7)) - REGULATOR_7) < 1e-9


@pytest.mark.parametrize("ell", [163, 313, 1063, 1489, 1777])
def test_against_frozen_pari(ell):
    r = _result(ell)
    assert sorted(r.invariants) == sorted(PARI_CYC[ell])
    assert r.h == math.prod(PARI_CYC[ell])


def test_all_conductors_below_2000():
    for ell in sieve_candidates(2000):
        r = _result(ell)
        assert sorted(r.invariants) == sorted(PARI_CYC.get(ell, [])), ell


def test_certificate_records_completion():
    r = _result(277)
    c = r.certificate
    assert c["fb_bound"] >= c["minkowski_bound"]
    assert abs(float(c["ratio"]) - 1) < 1e-9
    with mpmath.workdps(30):
        assert abs(r.h * mpmath.mpf(c["regulator"]) - CG.analytic_hR(277)) < 1e-8


def test_larger_factor_base_is_stable():
    base = _result(1777)
    wider = CG.class_group(period_polynomial(1777), fb_bound=600.0, start_box=3)
    assert wider.invariants == base.invariants
    assert wider.certificate["fb_size"] > base.certificate["fb_size"]


def test_factor_base_below_minkowski_rejected():
    with pytest.raises(ValueError):
        CG.class_group(period_polynomial(163), fb_bound=10.0)


def test_condition2():
    assert CG.condition2(163) is True
    assert CG.condition2(1777) is True
    assert CG.condition2(313) is False
    assert CG.condition2(7) is False


def test_even_class_numbers_divisible_by_four():
    for ell in sieve_candidates(2000):
        h = _result(ell).h
        assert h % 2 == 1 or h % 4 == 0


def test_valuations_account_for_norm():
    L = period_polynomial(163)
    fb = CG.factor_base(L, CG.minkowski_bound(163))
    alpha = [3, -2, 5]
    n = abs(L.norm(alpha))
    covered = 1
    for P in fb:
        covered *= P.norm ** CG.valuation(L, alpha, P)
    assert n % covered == 0
    # the rest of the norm has no factor-base prime in it
    rest = n // covered
    assert all(rest % P.p for P in fb)


def test_norm_vectorized_matches_exact():
    L = period_polynomial(997)
    box = CG._box(3)
    fast = CG._norms(L, box)
    assert [int(v) for v in fast] == [L.norm(c) for c in box.tolist()]


def test_rejects_non_conductor():
    from tetrasieve.cubic import FieldError
    with pytest.raises(FieldError):
        CG.condition2(11)
