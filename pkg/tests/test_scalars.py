import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perfgroups.scalars import (
    DigitExpansion,
    Localization,
    NegativeValue,
    NotLocalized,
    ScalarError,
    clearing_exponent,
    format_scalar,
    lucas_digit,
    p_power_exponent,
    parse_scalar,
    to_digits,
    valuation,
)

PRIMES = (2, 3, 5, 7)


def nonneg_zp(p, max_num=10**4, max_exp=4):
    return st.builds(lambda a, e: Fraction(a, p**e), st.integers(0, max_num), st.integers(0, max_exp))


# -- digit expansions --------------------------------------------------------


def test_digits_of_five_base_three():
    assert to_digits(5, 3).digits == {0: 2, 1: 1}


def test_digits_of_five_thirds():
    assert to_digits(Fraction(5, 3), 3).digits == {-1: 2, 0: 1}


def test_digits_of_zero_is_empty():
    assert to_digits(0, 2).digits == {}
    assert to_digits(0, 2).support() == ()


def test_negative_value_rejected():
    with pytest.raises(NegativeValue):
        to_digits(-1, 3)


def test_non_localized_value_rejected():
    with pytest.raises(NotLocalized):
        to_digits(Fraction(1, 2), 3)


def test_missing_digit_reads_as_zero():
    d = to_digits(10, 3)
    assert d[0] == 1 and d[1] == 0 and d[2] == 1 and d[-5] == 0


@pytest.mark.parametrize("p", PRIMES)
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_digit_round_trip(p, data):
    x = data.draw(nonneg_zp(p))
    d = to_digits(x, p)
    assert d.value() == x
    assert all(0 < v < p for v in d.digits.values())


def test_digit_expansion_value_direct():
    assert DigitExpansion(3, {-1: 1, 2: 2}).value() == Fraction(1, 3) + 18


# -- the localization context -----------------------------------------------


def test_parse_accepts_p_power_denominator():
    R = Localization(3)
    assert R.parse("5/3") == Fraction(5, 3)
    assert R.parse("-7/27") == Fraction(-7, 27)
    assert R.parse("4") == 4


@pytest.mark.parametrize("bad", ["5/3^1", "1/2", "abc", "1/0", "", "3/"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ScalarError):
        Localization(3).parse(bad)


def test_parse_rejects_foreign_denominator_with_specific_error():
    with pytest.raises(NotLocalized):
        parse_scalar("1/6", 3)


def test_format_round_trip():
    R = Localization(5)
    for s in ["0", "1", "-3", "7/5", "-2/125"]:
        assert R.format(R.parse(s)) == s


def test_format_is_canonical():
    assert format_scalar(Fraction(6, 9)) == "2/3"
    assert format_scalar(Fraction(9, 3)) == "3"


def test_split_is_canonical():
    R = Localization(3)
    assert R.split(Fraction(5, 9)) == (5, 2)
    assert R.split(Fraction(9, 3)) == (3, 0)
    num, pexp = R.split(Fraction(6, 27))
    assert pexp == 0 or num % 3 != 0


def test_units_are_signed_p_powers():
    R = Localization(3)
    assert R.is_unit(Fraction(1, 3)) and R.is_unit(-9) and R.is_unit(1)
    assert not R.is_unit(2) and not R.is_unit(0) and not R.is_unit(Fraction(2, 3))


def test_valuation_values():
    R = Localization(2)
    assert R.valuation(Fraction(3, 8)) == -3
    assert R.valuation(12) == 2
    assert valuation(-12, 2) == 2


def test_non_prime_context_rejected():
    with pytest.raises(ScalarError):
        Localization(6)


def test_membership():
    R = Localization(2)
    assert Fraction(3, 4) in R
    assert Fraction(1, 3) not in R


def test_p_power_exponent():
    assert p_power_exponent(27, 3) == 3
    assert p_power_exponent(1, 7) == 0
    assert p_power_exponent(12, 2) == -1


def test_clearing_exponent():
    assert clearing_exponent(3, Fraction(1, 9), 2, Fraction(5, 3)) == 2
    assert clearing_exponent(5) == 0


# -- Lucas digit ---------------------------------------------------------------


def test_lucas_kills_middle_of_row_four_mod_three():
    assert lucas_digit(4, 2, 3) == 0


def test_lucas_scaled_argument():
    assert lucas_digit(Fraction(4, 3), Fraction(1, 3), 3) == 1


def test_lucas_three_choose_one_mod_two():
    assert lucas_digit(3, 1, 2) == 1


def test_lucas_out_of_range_is_zero():
    assert lucas_digit(3, 4, 5) == 0
    assert lucas_digit(3, -1, 5) == 0


def _bigint_lucas(n, j, p):
    l = clearing_exponent(p, n, j)
    return comb(int(n * p**l), int(j * p**l)) % p


@pytest.mark.parametrize("p", PRIMES)
def test_lucas_product_law_against_bigint_binomials(p):
    rng = random.Random(1000 + p)
    for _ in range(500):
        e = rng.randint(0, 4)
        N = rng.randint(0, 40 * p**e if p < 7 else 5 * p**e)
        J = rng.randint(0, N)
        n, j = Fraction(N, p**e), Fraction(J, p**e)
        assert lucas_digit(n, j, p) == _bigint_lucas(n, j, p), (n, j)


@pytest.mark.parametrize("p", PRIMES)
def test_lucas_scale_invariance(p):
    rng = random.Random(p)
    for _ in range(200):
        e = rng.randint(0, 3)
        N = rng.randint(0, 300)
        J = rng.randint(0, N)
        n, j = Fraction(N, p**e), Fraction(J, p**e)
        assert lucas_digit(n, j, p) == lucas_digit(p * n, p * j, p)
