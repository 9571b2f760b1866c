"""Exact rational literals.

Rationals travel as strings ``"a/b"`` (or decimal strings, converted exactly).
Binary floats are refused: they cannot represent most cut values and would
blur the eigenvalue crossings that the index formulas depend on.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

from .errors import InvalidInputError

RationalLike = Union[int, str, Fraction]


def parse_rational(value: object, *, what: str = "value") -> Fraction:
    if isinstance(value, bool):
        raise InvalidInputError(f"{what}: booleans are not rationals")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        raise InvalidInputError(
            f"{what}: binary float {value!r} rejected; pass an exact string such as '3/2'"
        )
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise InvalidInputError(f"{what}: cannot parse {value!r} as a rational") from None
    raise InvalidInputError(f"{what}: unsupported type {type(value).__name__}")


def parse_real(value: object, *, what: str = "value") -> Fraction | float:
    """Like :func:`parse_rational` but lets finite floats through unchanged."""
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidInputError(f"{what}: must be finite")
        return value
    return parse_rational(value, what=what)


def format_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def format_real(x: Fraction | float | int) -> str:
    if isinstance(x, float):
        return repr(x)
    return format_rational(x)


def rational_gcd(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(math.gcd(a.numerator, b.numerator), math.lcm(a.denominator, b.denominator))


def rational_lcm(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(math.lcm(a.numerator, b.numerator), math.gcd(a.denominator, b.denominator))
