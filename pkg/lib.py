"""Shared functions for the wave calculus modules"""
from fractions import Fraction
import hashlib
import math

import numpy as np

from exception import ConfigurationException


def parse_text_matching_options(valid_options):
    """
    Create a function to validate a string against choices

    Args:
        valid_options (list of str): Valid options for the text
    """

    def validate(text):
        """
        Verify that the string matches one of the options, or else raise an exception

        Args:
            text (str): Some text
        """
        if text not in valid_options:
            raise ConfigurationException(
                f"Unexpected option {text}. Valid options: {', '.join(valid_options)}"
            )
        return text

    return validate


def parse_extended_real(value):
    """
    Parse an exponent which may be infinite or written as a fraction

    Args:
        value (str or int or float): Something like 2, "10/3", "inf"

    Returns:
        float: The parsed value
    """
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    text = str(value).strip().lower()
    if text in ("inf", "infinity", "∞"):
        return math.inf
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as ex:
        raise ConfigurationException(f"Unable to parse exponent {value}") from ex


def parse_rational(value):
    """
    Parse a rational number like "1/2"

    Args:
        value (str or int or Fraction): The number

    Returns:
        Fraction: The parsed number
    """
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as ex:
        raise ConfigurationException(f"Unable to parse rational {value}") from ex


def is_power_of_two(value):
    """Is the value 2**k for some integer k (negative k allowed)?"""
    if value <= 0:
        return False
    mantissa, _ = math.frexp(value)
    return mantissa == 0.5


def is_integer_power_of_two(value):
    """Is value a positive integer power of two?"""
    return isinstance(value, (int, np.integer)) and value > 0 and value & (value - 1) == 0


def dyadic_values(low, high):
    """
    List the powers of two between low and high, inclusive

    Args:
        low (float): Smallest allowed value
        high (float): Largest allowed value

    Returns:
        list of float: Increasing powers of two
    """
    first = math.ceil(math.log2(low) - 1e-12)
    last = math.floor(math.log2(high) + 1e-12)
    return [2.0**k for k in range(first, last + 1)]


def matches_dyadic(value, values):
    """Return the index of value within a list of dyadic values, or None"""
    for index, candidate in enumerate(values):
        if math.isclose(value, candidate, rel_tol=1e-12):
            return index
    return None


def content_hash(*arrays):
    """
    Hash the bytes of some arrays

    Args:
        arrays (list of np.ndarray): Arrays to hash, in order

    Returns:
        str: The hex digest
    """
    digest = hashlib.sha256()
    for array in arrays:
        contiguous = np.ascontiguousarray(array)
        digest.update(str(contiguous.dtype).encode("utf-8"))
        digest.update(str(contiguous.shape).encode("utf-8"))
        digest.update(contiguous.tobytes())
    return digest.hexdigest()


def frozen(array):
    """Return a read-only view of an array"""
    view = np.asarray(array).view()
    view.flags.writeable = False
    return view
