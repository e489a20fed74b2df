"""Dual-mode scalars: exact rationals where possible, complex floats otherwise."""

from fractions import Fraction
from math import isqrt, sqrt
import numbers

FLOAT_ZERO = 1e-14


def as_fraction(value):
    """Return ``value`` as a Fraction when it is an exact rational, else None."""
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            return None
    return None


def rational_sqrt(value):
    """Square root of a non-negative Fraction if it is rational, else None."""
    value = Fraction(value)
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def exact_or_float_sqrt(value):
    root = None
    if isinstance(value, (int, Fraction)):
        root = rational_sqrt(value)
    if root is not None:
        return root
    return sqrt(float(value))


def is_exact(value):
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def is_zero(value):
    if is_exact(value):
        return value == 0
    return abs(value) < FLOAT_ZERO


def to_float_scalar(value):
    """Demote an exact scalar to float; complex values pass through."""
    if isinstance(value, complex):
        return value
    return float(value)


def conj(value):
    if isinstance(value, complex):
        return value.conjugate()
    return value


def scalar_to_json(value):
    """JSON-friendly rendering: ints, rational strings, floats or [re, im]."""
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return value.numerator
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, complex):
        if value.imag == 0:
            return float(value.real)
        return [float(value.real), float(value.imag)]
    if isinstance(value, numbers.Real):
        return float(value)
    raise TypeError(f"not a scalar: {value!r}")


def scalar_from_json(value):
    if isinstance(value, list):
        return complex(value[0], value[1])
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return value
    return float(value)
