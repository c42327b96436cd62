"""Tests for the cubic period field."""

import itertools

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from tetrasieve import cubic as K


def _poly_from_numerical_periods(ell):
    eta = K.numerical_periods(ell, dps=40)
    e1 = sum(eta)
    e2 = eta[0] * eta[1] + eta[0] * eta[2] + eta[1] * eta[2]
    e3 = eta[0] * eta[1] * eta[2]
    return [1, -int(mpmath.nint(e1)), int(mpmath.nint(e2)), -int(mpmath.nint(e3))]


@pytest.mark.parametrize("ell", [7, 13, 19, 163, 1777])
def test_period_polynomial_matches_numerical_periods(ell):
    assert K.period_polynomial(ell).poly == _poly_from_numerical_periods(ell)


def test_small_period_polynomials():
    assert K.period_polynomial(7).poly == [1, 1, -2, -1]
    assert K.period_polynomial(13).poly == [1, 1, -4, 1]


@pytest.mark.parametrize("ell", [7, 13, 31, 163, 277, 1009])
def test_field_discriminant_and_profile(ell):
    L = K.period_polynomial(ell)
    assert L.disc_field == ell ** 2
    assert K.factorization_profile(ell, L) == (3, 1, 1)


def test_profiles_at_small_primes():
    L = K.period_polynomial(163)
    for p in K.primes_upto(60):
        if p <= 3:
            continue
        prof = K.factorization_profile(p, L)
        if pow(p, (163 - 1) // 3, 163) == 1:
            assert prof == (1, 1, 3)
        else:
            assert prof == (1, 3, 1)


def test_sieve_candidates():
    assert K.sieve_candidates(20) == [7, 13, 19]
    assert K.sieve_candidates(6) == []
    assert 163 in K.sieve_candidates(170)
    assert all(p % 3 == 1 for p in K.sieve_candidates(2000))


def test_shanks_examples():
    assert K.shanks_classify(163) == K.Shanks(11)
    assert K.shanks_classify(7) == K.Shanks(-1)
    assert isinstance(K.shanks_classify(277), K.NotShanks)
    assert K.shanks_classify(349) == K.Shanks(17)
    assert isinstance(K.shanks_classify(397), K.NotShanks)


def test_shanks_same_field():
    L = K.period_polynomial(163)
    poly = K.simplest_cubic(11)
    assert K.cubic_discriminant(poly) == 163 ** 2
    x = K.same_field_element(L, poly)
    assert x is not None
    assert L.charpoly(x) == poly


@settings(max_examples=60, deadline=None)
@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5),
       st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5))
def test_norm_multiplicative_and_galois_invariant(a, b, c, d, e, f):
    L = K.period_polynomial(13)
    x, y = [a, b, c], [d, e, f]
    assert L.norm(L.mul(x, y)) == L.norm(x) * L.norm(y)
    assert L.norm(L.sigma(x)) == L.norm(x)
    assert L.trace(L.sigma(x, 2)) == L.trace(x)


def test_embeddings_are_ring_maps():
    L = K.period_polynomial(19)
    for x, y in itertools.product([[1, 0, 2], [-1, 3, 0]], [[0, 1, 1], [2, -2, 5]]):
        ex, ey, exy = L.embed(x), L.embed(y), L.embed(L.mul(x, y))
        with mpmath.workdps(30):
            assert all(abs(ex[j] * ey[j] - exy[j]) < 1e-20 for j in range(3))
    with mpmath.workdps(30):
        assert all(abs(v - 1) < 1e-25 for v in L.embed(L.one()))
        assert all(abs(v + 5) < 1e-25 for v in L.embed(L.integer(-5)))


def test_degree_one_homs_are_ring_maps():
    L = K.period_polynomial(163)
    p = next(q for q in K.primes_upto(100) if q > 3 and pow(q, 54, 163) == 1)
    homs = K.degree_one_homs(L, p)
    assert len(homs) == 3
    x, y = [3, -1, 4], [2, 7, -5]
    xy = L.mul(x, y)
    for h in homs:
        def ev(v):
            return sum(a * b for a, b in zip(v, h)) % p
        assert ev(xy) == ev(x) * ev(y) % p
        assert ev(L.one()) == 1


def test_bad_conductor_rejected():
    with pytest.raises(K.FieldError):
        K.period_polynomial(11)
