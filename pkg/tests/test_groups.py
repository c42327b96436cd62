"""Tests for SL(2, Z/3^n), A4 and tame local data."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tetrasieve import groups as G
from tetrasieve import modules as M


def test_sl2_orders():
    assert G.enumerate_sl2(1).order == 24
    assert G.enumerate_sl2(2).order == 648
    assert G.count_sl2_bruteforce(1) == 24
    assert G.count_sl2_bruteforce(2) == 648


def test_unsupported_level():
    with pytest.raises(ValueError):
        G.enumerate_sl2(3)


def test_center_of_sl2_f3():
    sl = G.enumerate_sl2(1)
    center = sorted(sl.elements[i] for i in sl.center())
    assert center == sorted([(1, 0, 0, 1), (2, 0, 0, 2)])


def test_element_orders_sl2_f3():
    sl = G.enumerate_sl2(1)
    orders = {sl.element_order(i) for i in range(sl.order)}
    assert orders <= {1, 2, 3, 4, 6}
    for x in sl.elements:
        assert G.mat_pow(x, 24, 1) == G.identity(1)


def test_element_order_examples():
    assert G.element_order((1, 1, 0, 1), 2) == 9
    assert G.element_order((1, 1, 0, 1), 1) == 3
    assert G.element_order((0, -1, 1, -1), 1) == 3


def test_det_minus_identity_identity():
    sl = G.enumerate_sl2(1)
    for x in sl.elements:
        assert G.det_minus_identity(x, 1) == (2 - G.mat_trace(x, 1)) % 3
    rng = np.random.default_rng(5)
    sl9 = G.enumerate_sl2(2)
    for i in rng.integers(0, sl9.order, size=100):
        x = sl9.elements[int(i)]
        assert G.det_minus_identity(x, 2) == (2 - G.mat_trace(x, 2)) % 9


def test_projectivize_is_a4():
    sl = G.enumerate_sl2(1)
    psl = G.projectivize(sl)
    assert psl.order == 12
    assert psl.subgroups_of_order(6) == []
    assert psl.index[G.psl_class((2, 0, 0, 2))] == psl.identity
    assert len(psl.commutator_subgroup()) == 4
    a4 = G.a4_table()
    phi = G.psl_to_a4(psl, a4)
    assert len(set(phi)) == 12
    assert all(G.perm_sign(p) == 1 for p in a4.elements)


def test_fixed_a4_identification():
    assert G.p1_permutation((0, -1, 1, 0)) == G.A4_G1
    assert G.p1_permutation((1, 1, 0, 1)) == G.A4_G2


def test_klein_subgroup_unique():
    a4 = G.a4_table()
    v4 = G.klein_subgroup(a4)
    assert len(v4) == 4
    assert sorted(v4) == sorted(a4.commutator_subgroup())
    normal4 = [s for s in a4.subgroups_of_order(4) if a4.is_normal(s)]
    assert len(normal4) == 1
    psl = G.projectivize(G.enumerate_sl2(1))
    assert len([s for s in psl.subgroups_of_order(4) if psl.is_normal(s)]) == 1


def test_central_twist_normalize():
    t = (1, 1, 0, 1)
    assert G.central_twist_normalize((1, 0, 0, 1), t) == (1, 1)
    assert G.central_twist_normalize((-1, 0, 0, -1), t) == (-1, 1)
    assert G.central_twist_normalize((-1, 0, 0, -1), (-1, -1, 0, -1)) == (-1, -1)
    with pytest.raises(ValueError):
        G.central_twist_normalize((0, -1, 1, 0), t)


def test_hensel_sqrt_examples():
    assert G.hensel_sqrt_ell(7, 2) == 4
    assert G.hensel_sqrt_ell(13, 2) == 7
    assert G.hensel_sqrt_ell(163, 2) == 1
    # brute-force oracle
    for ell in (7, 13, 19, 163, 277):
        sols = [x for x in range(9) if x % 3 == 1 and (x * x - ell) % 9 == 0]
        assert sols == [G.hensel_sqrt_ell(ell, 2)]
    with pytest.raises(ValueError):
        G.hensel_sqrt_ell(5, 2)


def test_c_ell_template_examples():
    d = G.c_ell_template(7, 1, 0)
    assert d.sigma == (1, 0, 0, 1) and d.tau == (1, 1, 0, 1)
    d = G.c_ell_template(7, 2, 0)
    assert d.sigma == (4, 0, 0, 7)
    assert d.relation_holds()
    assert G.mat_pow(d.tau, 7, 2) == G.mat_pow(d.tau, 7 % 9, 2)
    assert G.c_ell_template(163, 2, 3).relation_holds()
    with pytest.raises(ValueError):
        G.c_ell_template(7, 2, 1)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([7, 13, 19, 31, 37, 43, 61, 67, 73, 79, 97, 163, 277, 349]),
       st.sampled_from([1, 2, 3, 4]), st.integers(0, 200))
def test_c_ell_template_relation(ell, level, y):
    d = G.c_ell_template(ell, level, 3 * y)
    assert d.relation_holds()


def test_frattini_quotient():
    fr = G.frattini_quotient_gamma()
    assert fr.dim == 3
    sl = fr.group
    minus = sl.index[(2, 0, 0, 2)]
    assert np.array_equal(fr.act(minus), np.eye(3, dtype=np.int64))
    assert len(M.hom_space(fr, M.ad0_sl2())) == 1
    iso = M.hom_space(fr, M.ad0_sl2())[0]
    assert M.is_equivariant(iso, fr, M.ad0_sl2())
    assert int(round(np.linalg.det(iso))) % 3 != 0


def test_group_tables_closed():
    for g in (G.enumerate_sl2(1), G.a4_table(), G.cyclic_table(2)):
        n = g.order
        assert set(g.mul.ravel().tolist()) == set(range(n))
        for a, b, c in itertools.product(range(min(n, 8)), repeat=3):
            assert g.mul[g.mul[a, b], c] == g.mul[a, g.mul[b, c]]
