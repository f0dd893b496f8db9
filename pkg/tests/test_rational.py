import pytest
from hypothesis import given, strategies as st

from ctxlab.rational import (
    Q,
    as_rational,
    format_rational,
    parse_rational,
    to_float,
)


def test_decimal_parsing_is_exact():
    assert parse_rational("0.25") == Q(1, 4)
    assert parse_rational("0.1") == Q(1, 10)
    assert parse_rational("-0.3") == Q(-3, 10)
    assert parse_rational("1e-3") == Q(1, 1000)
    assert parse_rational("2.5E2") == Q(250)
    assert parse_rational("3/4") == Q(3, 4)
    assert parse_rational(" -7/2 ") == Q(-7, 2)


def test_float_coercion_goes_through_decimal_text():
    # repr(0.1) is "0.1", so the coercion must hit 1/10 exactly,
    # not the binary expansion 3602879701896397/2**55
    assert as_rational(0.1) == Q(1, 10)
    assert as_rational(0.25) == Q(1, 4)


def test_bad_literals_rejected():
    with pytest.raises(ValueError):
        parse_rational("1/0")
    with pytest.raises(ValueError):
        parse_rational("abc")
    with pytest.raises(ValueError):
        parse_rational("")
    with pytest.raises(TypeError):
        as_rational(True)
    with pytest.raises(ValueError):
        as_rational(float("nan"))


def test_format_round_trip():
    assert format_rational(Q(0)) == "0"
    assert format_rational(Q(4, 2)) == "2"
    assert format_rational(Q(-3, 7)) == "-3/7"
    assert parse_rational(format_rational(Q(22, 7))) == Q(22, 7)


@given(st.integers(-10**6, 10**6), st.integers(1, 10**6))
def test_round_trip_random(num, den):
    q = Q(num, den)
    assert parse_rational(format_rational(q)) == q


@given(st.integers(-10**9, 10**9), st.integers(1, 10**9))
def test_lowest_terms_and_positive_denominator(num, den):
    q = Q(num, den)
    from math import gcd

    assert q.denominator > 0
    assert gcd(int(q.numerator), int(q.denominator)) == 1
    assert abs(to_float(q) - num / den) < 1e-9
