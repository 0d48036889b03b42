"""Tests for lib"""
from fractions import Fraction
import math

import numpy as np
import pytest

from exception import ConfigurationException
from lib import (
    content_hash,
    dyadic_values,
    frozen,
    is_integer_power_of_two,
    is_power_of_two,
    matches_dyadic,
    parse_extended_real,
    parse_rational,
    parse_text_matching_options,
)


def test_parse_text_matching_options():
    """
    parse_text_matching_options should create a function to return the same text if it matches one of the options
    """
    assert parse_text_matching_options(["abc", "xyz"])("xyz") == "xyz"
    assert parse_text_matching_options(["abc", "xyz"])("abc") == "abc"


def test_parse_text_matching_options_error():
    """
    parse_text_matching_options should error if the text does not match an option
    """
    with pytest.raises(ConfigurationException) as ex:
        parse_text_matching_options(["abc", "xyz"])("def")
    assert ex.value.args[0] == "Unexpected option def. Valid options: abc, xyz"


@pytest.mark.parametrize(
    "value, expected",
    [(2, 2.0), ("10/3", 10 / 3), ("inf", math.inf), ("∞", math.inf), (" Infinity ", math.inf), (4.5, 4.5)],
)
def test_parse_extended_real(value, expected):
    """parse_extended_real should read integers, fractions and infinity"""
    assert parse_extended_real(value) == expected


@pytest.mark.parametrize("value", ["two", "1/0", True])
def test_parse_extended_real_error(value):
    """parse_extended_real should reject text which is not a number"""
    with pytest.raises(ConfigurationException):
        parse_extended_real(value)


def test_parse_rational():
    """parse_rational should keep exact fractions"""
    assert parse_rational("1/2") == Fraction(1, 2)
    assert parse_rational(3) == Fraction(3)
    with pytest.raises(ConfigurationException) as ex:
        parse_rational("half")
    assert ex.value.args[0] == "Unable to parse rational half"


@pytest.mark.parametrize(
    "value, expected", [(1, True), (0.125, True), (64.0, True), (3, False), (0, False), (-2, False)]
)
def test_is_power_of_two(value, expected):
    """is_power_of_two should accept negative exponents"""
    assert is_power_of_two(value) is expected


@pytest.mark.parametrize(
    "value, expected", [(32, True), (np.int64(16), True), (0.5, False), (12, False), (32.0, False)]
)
def test_is_integer_power_of_two(value, expected):
    """is_integer_power_of_two should only accept positive integers"""
    assert is_integer_power_of_two(value) is expected


def test_dyadic_values():
    """dyadic_values should include both ends when they are powers of two"""
    assert dyadic_values(1, 16) == [1.0, 2.0, 4.0, 8.0, 16.0]
    assert dyadic_values(0.3, 3) == [0.5, 1.0, 2.0]
    assert dyadic_values(3, 3.5) == []


def test_matches_dyadic():
    """matches_dyadic should find values up to rounding"""
    assert matches_dyadic(4.0 * (1 + 1e-14), [1.0, 2.0, 4.0]) == 2
    assert matches_dyadic(3.0, [1.0, 2.0, 4.0]) is None


def test_content_hash():
    """content_hash should depend on the values, dtype and shape of every array"""
    values = np.arange(4.0)
    digest = content_hash(values)
    assert digest == content_hash(np.arange(4.0))
    assert len(digest) == 64
    assert digest != content_hash(values.reshape(2, 2))
    assert digest != content_hash(values.astype(complex))
    assert digest != content_hash(values, values)


def test_frozen():
    """frozen should return a view which cannot be written"""
    array = np.zeros(3)
    view = frozen(array)
    with pytest.raises(ValueError):
        view[0] = 1.0
    array[0] = 2.0
    assert view[0] == 2.0
