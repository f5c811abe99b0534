from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from fctsolve.cf_core import (
    ExpansionError,
    convergents,
    fct_expand,
    sum_by_pairs,
    three_term_check,
    two_term_solution,
)
from fctsolve.factorization import primes_up_to

P_EX = 11756638905368616011414050501310355554617941987811609
FOURK_EX = 1960490455533318809410064185473201382030123301988960
D_EX = 6303827831296845046334611528852737562797824122151


def ceiling_expand_by_hand(a, b, cap=65):
    """Reference expansion written directly from the definition."""
    out = []
    while b and len(out) < cap:
        c = -(-a // b)
        out.append(c)
        a, b = b, c * b - a
    return out


def test_expand_7_4():
    cf = fct_expand(7, 4)
    assert cf.coefficients == (2, 4)
    assert cf.conv_num == (2, 7)
    assert cf.conv_den == (1, 4)


def test_expand_13_8():
    cf = fct_expand(13, 8)
    assert cf.coefficients == (2, 3, 3)
    assert cf.conv_num == (2, 5, 13)
    assert cf.conv_den == (1, 3, 8)


def test_expand_worked_example():
    cf = fct_expand(P_EX, FOURK_EX)
    assert cf.coefficients == (6, 311, D_EX)
    assert cf.conv_num[-1] == P_EX
    assert cf.conv_den[-1] == FOURK_EX


@pytest.mark.parametrize("num, den", [(0, 4), (4, 0), (-3, 5)])
def test_expand_rejects_degenerate(num, den):
    with pytest.raises(ExpansionError):
        fct_expand(num, den)


def test_expand_length_cap():
    # 64/63 -> [2, 2, ..., 2] with 63 coefficients; 66/65 needs 65
    assert len(fct_expand(64, 63)) == 63
    with pytest.raises(ExpansionError):
        fct_expand(66, 65)


def test_sum_by_pairs_examples():
    u = sum_by_pairs(fct_expand(7, 4))
    assert u.terms == (2, 14)
    assert u.total() == Fraction(4, 7)
    u = sum_by_pairs(fct_expand(13, 8))
    assert u.terms == (2, 10, 65)
    assert u.total() == Fraction(8, 13)


def test_sum_by_pairs_worked_example():
    u = sum_by_pairs(fct_expand(P_EX, FOURK_EX))
    assert len(u.terms) == 3
    assert u.total() == Fraction(FOURK_EX, P_EX)


def test_sum_by_pairs_needs_numerator_two():
    with pytest.raises(ExpansionError):
        sum_by_pairs(fct_expand(1, 5))


def test_three_term_examples():
    assert three_term_check(13, 8) == (2, 3, 3)
    assert three_term_check(7, 4) is None
    assert three_term_check(P_EX, FOURK_EX) == (6, 311, D_EX)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10**12), st.integers(1, 10**12))
def test_recurrence_consistency(num, den):
    by_hand = ceiling_expand_by_hand(num, den)
    if len(by_hand) > 64:
        with pytest.raises(ExpansionError):
            fct_expand(num, den)
        return
    cf = fct_expand(num, den)
    assert list(cf.coefficients) == by_hand
    g = gcd(num, den)
    assert (cf.conv_num[-1], cf.conv_den[-1]) == (num // g, den // g)
    p2, p1 = 0, 1
    q2, q1 = -1, 0
    for c, p, q in zip(cf.coefficients, cf.conv_num, cf.conv_den):
        assert p == c * p1 - p2
        assert q == c * q1 - q2
        p2, p1, q2, q1 = p1, p, q1, q
    assert all(c >= 2 for c in cf.coefficients[1:])


@settings(max_examples=500, deadline=None)
@given(st.integers(2, 10**6), st.integers(1, 10**6))
def test_sum_by_pairs_is_reciprocal(num, den):
    g = gcd(num, den)
    if num // g < 2 or len(ceiling_expand_by_hand(num, den)) > 64:
        return
    u = sum_by_pairs(fct_expand(num, den))
    assert u.total() == Fraction(den, num)
    assert list(u.terms) == sorted(u.terms)


def test_convergents_seed_gives_unit_q0():
    nums, dens = convergents([5, 3, 7])
    assert dens[0] == 1
    assert nums[0] == 5


def test_three_term_iff_inner_congruence_exhaustive():
    for p in range(3, 1001, 2):
        for fourk in range(4, 2 * p + 1, 4):
            c0 = -(-p // fourk)
            r0 = c0 * fourk - p
            inner = r0 >= 2 and (fourk + 1) % r0 == 0
            got = three_term_check(p, fourk)
            assert (got is not None) == inner, (p, fourk)
            if got is not None:
                assert len(fct_expand(p, fourk)) == 3


def test_two_term_corollary_small_primes():
    for p in primes_up_to(20000):
        if p % 4 != 3:
            continue
        cf = fct_expand(p, p + 1)
        assert cf.coefficients == (1, p + 1)
        a, b = two_term_solution(p)
        assert Fraction(1, a) + Fraction(1, b) == Fraction(4, p)
        assert (a, b) == ((p + 1) // 4, p * (p + 1) // 4)


def test_two_term_rejects_1_mod_4():
    with pytest.raises(ValueError):
        two_term_solution(13)
