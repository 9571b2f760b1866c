"""Bernoulli numbers and polynomials in exact arithmetic."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

from .errors import DegreeCapError, InvalidInputError

DEFAULT_DEGREE_CAP = 32


@lru_cache(maxsize=None)
def bernoulli_number(j: int) -> Fraction:
    """B_j with the convention B_1 = -1/2."""
    if j < 0:
        raise InvalidInputError("Bernoulli index must be non-negative")
    if j == 0:
        return Fraction(1)
    # sum_{k<j} C(j+1, k) B_k + (j+1) B_j = 0
    acc = sum(comb(j + 1, k) * bernoulli_number(k) for k in range(j))
    return -acc / (j + 1)


def bernoulli_polynomial(j: int, x: Fraction | int, *, cap: int = DEFAULT_DEGREE_CAP) -> Fraction:
    """Exact B_j(x) = sum_k C(j, k) B_k x^(j-k)."""
    if j < 0:
        raise InvalidInputError("Bernoulli degree must be non-negative")
    if j > cap:
        raise DegreeCapError(f"Bernoulli degree {j} exceeds cap {cap}")
    x = Fraction(x)
    # Horner in x over the coefficients C(j, k) B_k of x^(j-k)
    acc = Fraction(0)
    for k in range(j + 1):
        acc = acc * x + comb(j, k) * bernoulli_number(k)
    return acc


def power_sum(j: int, count: int) -> Fraction:
    """sum_{k=0}^{count-1} k^j (with 0^0 = 1)."""
    if count <= 0:
        return Fraction(0)
    return (bernoulli_polynomial(j + 1, count, cap=j + 1) - bernoulli_polynomial(j + 1, 0, cap=j + 1)) / (j + 1)
