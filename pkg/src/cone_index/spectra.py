"""Exact boundary Dirac spectra.

A spectrum is a finite set of arithmetic progressions ``sign * (offset + k*step)``
with polynomial multiplicities, a finite list of exceptional nonzero
eigenvalues and the dimension of the kernel. Everything is held as
:class:`fractions.Fraction`; interval endpoints may additionally be
``-inf``/``+inf``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Sequence, Union

from .bernoulli import power_sum
from .errors import (
    EnumerationLimitError,
    InfiniteCountError,
    InvalidDimensionError,
    InvalidInputError,
)
from .rational import format_rational, parse_rational, rational_gcd, rational_lcm

DEFAULT_ENUMERATION_CAP = 10**6
DEFAULT_K_CHECK = 64

Endpoint = Union[Fraction, float]
NEG_INF = -math.inf
POS_INF = math.inf


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------


def _endpoint(value: object) -> Endpoint:
    if isinstance(value, float) and math.isinf(value):
        return value
    return parse_rational(value, what="interval endpoint")


@dataclass(frozen=True)
class Interval:
    lower: Endpoint
    upper: Endpoint
    lower_closed: bool = True
    upper_closed: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "lower", _endpoint(self.lower))
        object.__setattr__(self, "upper", _endpoint(self.upper))
        if self.lower == POS_INF or self.upper == NEG_INF:
            raise InvalidInputError("interval endpoints out of order")
        if self.lower > self.upper:
            raise InvalidInputError(f"interval lower {self.lower} > upper {self.upper}")
        # infinite endpoints are never attained
        if math.isinf(self.lower) and self.lower_closed:
            object.__setattr__(self, "lower_closed", False)
        if math.isinf(self.upper) and self.upper_closed:
            object.__setattr__(self, "upper_closed", False)

    @classmethod
    def closed(cls, lower: object, upper: object) -> Interval:
        return cls(lower, upper, True, True)

    @classmethod
    def half_open(cls, lower: object, upper: object) -> Interval:
        """``[lower, upper)``, the convention of the counting function N."""
        return cls(lower, upper, True, False)

    @classmethod
    def open(cls, lower: object, upper: object) -> Interval:
        return cls(lower, upper, False, False)

    @classmethod
    def point(cls, x: object) -> Interval:
        return cls(x, x, True, True)

    @classmethod
    def at_least(cls, x: object) -> Interval:
        return cls(x, POS_INF, True, False)

    @classmethod
    def below(cls, x: object) -> Interval:
        return cls(NEG_INF, x, False, False)

    @classmethod
    def parse(cls, text: str) -> Interval:
        """Parse ``"[a,b)"``-style notation; ``inf``/``-inf`` allowed."""
        s = text.strip()
        if len(s) < 3 or s[0] not in "[(" or s[-1] not in "])":
            raise InvalidInputError(f"cannot parse interval {text!r}")
        parts = s[1:-1].split(",")
        if len(parts) != 2:
            raise InvalidInputError(f"cannot parse interval {text!r}")

        def end(tok: str) -> Endpoint:
            tok = tok.strip().lower()
            if tok in ("-inf", "-oo", "-infinity"):
                return NEG_INF
            if tok in ("inf", "+inf", "oo", "+oo", "infinity"):
                return POS_INF
            return parse_rational(tok, what="interval endpoint")

        return cls(end(parts[0]), end(parts[1]), s[0] == "[", s[-1] == "]")

    @property
    def is_empty(self) -> bool:
        return self.lower == self.upper and not (self.lower_closed and self.upper_closed)

    @property
    def is_bounded(self) -> bool:
        return not (math.isinf(self.lower) or math.isinf(self.upper))

    def contains(self, x: Fraction | int) -> bool:
        if x < self.lower or x > self.upper:
            return False
        if x == self.lower and not self.lower_closed:
            return False
        if x == self.upper and not self.upper_closed:
            return False
        return True

    __contains__ = contains

    def contains_interval(self, other: Interval) -> bool:
        if other.is_empty:
            return True
        if self.is_empty:
            return False
        if other.lower < self.lower or (
            other.lower == self.lower and other.lower_closed and not self.lower_closed
        ):
            return False
        if other.upper > self.upper or (
            other.upper == self.upper and other.upper_closed and not self.upper_closed
        ):
            return False
        return True

    def negated(self) -> Interval:
        return Interval(-self.upper, -self.lower, self.upper_closed, self.lower_closed)

    def shifted(self, d: Fraction) -> Interval:
        return Interval(self.lower + d, self.upper + d, self.lower_closed, self.upper_closed)

    def scaled(self, c: Fraction) -> Interval:
        if c <= 0:
            raise InvalidInputError("interval scale factor must be positive")
        return Interval(self.lower * c, self.upper * c, self.lower_closed, self.upper_closed)

    def __str__(self) -> str:
        def fmt(x: Endpoint) -> str:
            if isinstance(x, float):
                return "inf" if x > 0 else "-inf"
            return format_rational(x)

        lb = "[" if self.lower_closed else "("
        rb = "]" if self.upper_closed else ")"
        return f"{lb}{fmt(self.lower)},{fmt(self.upper)}{rb}"


def _integer_range(interval: Interval) -> tuple[int, int | None]:
    """Integers k >= 0 lying in ``interval`` as ``(kmin, kmax)``; kmax None = unbounded."""
    if math.isinf(interval.lower):
        kmin = 0
    elif interval.lower_closed:
        kmin = max(0, math.ceil(interval.lower))
    else:
        kmin = max(0, math.floor(interval.lower) + 1)
    if math.isinf(interval.upper):
        return kmin, None
    if interval.upper_closed:
        kmax = math.floor(interval.upper)
    else:
        kmax = math.ceil(interval.upper) - 1
    return kmin, kmax


# ---------------------------------------------------------------------------
# Multiplicities and progressions
# ---------------------------------------------------------------------------


def _poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@dataclass(frozen=True)
class MultiplicityPolynomial:
    """m(k) = sum_j coefficients[j] * k**j, integer-valued and >= 0 on k = 0, 1, ..."""

    coefficients: tuple[Fraction, ...]
    k_check: int = field(default=DEFAULT_K_CHECK, compare=False)

    def __post_init__(self) -> None:
        coeffs = [parse_rational(c, what="multiplicity coefficient") for c in self.coefficients]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            coeffs = [Fraction(0)]
        object.__setattr__(self, "coefficients", tuple(coeffs))
        for k in range(self.k_check + 1):
            v = self._eval(k)
            if v < 0 or v.denominator != 1:
                raise InvalidInputError(f"multiplicity m({k}) = {v} is not a non-negative integer")

    @classmethod
    def constant(cls, m: int) -> MultiplicityPolynomial:
        return cls((Fraction(m),))

    @classmethod
    def from_binomial_basis(cls, weights: Sequence[int]) -> MultiplicityPolynomial:
        """sum_j weights[j] * C(k, j); non-negative integer weights give valid multiplicities."""
        coeffs = [Fraction(0)]
        for j, w in enumerate(weights):
            # C(k, j) = k(k-1)...(k-j+1)/j!
            basis = [Fraction(1)]
            for i in range(j):
                basis = _poly_mul(basis, [Fraction(-i), Fraction(1)])
            basis = [c * w / factorial(j) for c in basis]
            coeffs = [
                (coeffs[i] if i < len(coeffs) else 0) + (basis[i] if i < len(basis) else 0)
                for i in range(max(len(coeffs), len(basis)))
            ]
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return self.coefficients == (Fraction(0),)

    def _eval(self, k: Fraction | int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * k + c
        return acc

    def __call__(self, k: int) -> int:
        v = self._eval(k)
        return int(v)

    def evaluate(self, x: Fraction | int) -> Fraction:
        """Value at an arbitrary rational argument (no integrality implied)."""
        return self._eval(Fraction(x))

    def shift(self, d: Fraction | int) -> tuple[Fraction, ...]:
        """Coefficients of x -> m(x + d), not validated as a multiplicity."""
        d = Fraction(d)
        out = [Fraction(0)] * len(self.coefficients)
        for j, c in enumerate(self.coefficients):
            for i in range(j + 1):
                out[i] += c * comb(j, i) * d ** (j - i)
        return tuple(out)

    def shifted(self, d: int) -> MultiplicityPolynomial:
        """k -> m(k + d) for a non-negative integer d."""
        return MultiplicityPolynomial(self.shift(d), self.k_check)

    def dilated(self, r: int, i: int) -> MultiplicityPolynomial:
        """k -> m(r*k + i)."""
        return MultiplicityPolynomial(
            tuple(c * Fraction(r) ** j for j, c in enumerate(self.shift(i))), self.k_check
        )

    def __add__(self, other: MultiplicityPolynomial) -> MultiplicityPolynomial:
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (Fraction(0),) * (n - len(self.coefficients))
        b = other.coefficients + (Fraction(0),) * (n - len(other.coefficients))
        return MultiplicityPolynomial(tuple(x + y for x, y in zip(a, b)), self.k_check)

    def range_sum(self, kmin: int, kmax: int) -> int:
        """sum_{k=kmin}^{kmax} m(k) in closed form (Faulhaber)."""
        if kmax < kmin:
            return 0
        total = Fraction(0)
        for j, c in enumerate(self.coefficients):
            if c:
                total += c * (power_sum(j, kmax + 1) - power_sum(j, kmin))
        return int(total)


@dataclass(frozen=True)
class EigenvalueProgression:
    """Eigenvalues ``sign * (offset + k*step)``, k = 0, 1, 2, ..., with multiplicity m(k)."""

    sign: int
    offset: Fraction
    multiplicity: MultiplicityPolynomial
    step: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise InvalidInputError("progression sign must be +1 or -1")
        object.__setattr__(self, "offset", parse_rational(self.offset, what="offset"))
        object.__setattr__(self, "step", parse_rational(self.step, what="step"))
        if self.offset <= 0:
            raise InvalidInputError("progression offset must be positive")
        if self.step <= 0:
            raise InvalidInputError("progression step must be positive")

    def eigenvalue(self, k: int) -> Fraction:
        return self.sign * (self.offset + k * self.step)

    def index_of(self, x: Fraction) -> int | None:
        """k with eigenvalue(k) == x, if any."""
        k = (self.sign * x - self.offset) / self.step
        if k.denominator == 1 and k >= 0:
            return int(k)
        return None

    def k_range(self, interval: Interval) -> tuple[int, int | None]:
        j = interval if self.sign > 0 else interval.negated()
        if j.is_empty:
            return 0, -1
        return _integer_range(j.shifted(-self.offset).scaled(1 / self.step))

    def count(self, interval: Interval) -> int:
        kmin, kmax = self.k_range(interval)
        if kmax is None:
            if self.multiplicity.is_zero:
                return 0
            raise InfiniteCountError(f"interval {interval} contains a progression tail")
        return self.multiplicity.range_sum(kmin, kmax)

    def enumerate(self, interval: Interval, cap: int = DEFAULT_ENUMERATION_CAP) -> list[tuple[Fraction, int]]:
        kmin, kmax = self.k_range(interval)
        if kmax is None:
            if self.multiplicity.is_zero:
                return []
            raise InfiniteCountError(f"interval {interval} contains a progression tail")
        if kmax >= cap:
            raise EnumerationLimitError(f"enumeration index {kmax} exceeds cap {cap}")
        out = []
        for k in range(kmin, kmax + 1):
            m = self.multiplicity(k)
            if m:
                out.append((self.eigenvalue(k), m))
        return out

    def split(self, r: int) -> list[EigenvalueProgression]:
        """Refine into ``r`` progressions of step ``r*step`` covering the same eigenvalues."""
        return [
            EigenvalueProgression(
                self.sign, self.offset + i * self.step, self.multiplicity.dilated(r, i), self.step * r
            )
            for i in range(r)
        ]

    def drop_head(self, count: int) -> EigenvalueProgression:
        return EigenvalueProgression(
            self.sign, self.offset + count * self.step, self.multiplicity.shifted(count), self.step
        )

    def coincides_with(self, other: EigenvalueProgression) -> bool:
        """Whether the two progressions share (infinitely many) eigenvalues."""
        if self.sign != other.sign:
            return False
        g = rational_gcd(self.step, other.step)
        return ((other.offset - self.offset) / g).denominator == 1


# ---------------------------------------------------------------------------
# Spectrum model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumModel:
    progressions: tuple[EigenvalueProgression, ...] = ()
    exceptional: tuple[tuple[Fraction, int], ...] = ()
    kernel_dim: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "progressions", tuple(self.progressions))
        exc = []
        for lam, m in self.exceptional:
            lam = parse_rational(lam, what="exceptional eigenvalue")
            if lam == 0:
                raise InvalidInputError("eigenvalue 0 belongs in kernel_dim, not the exceptional list")
            if not isinstance(m, int) or m <= 0:
                raise InvalidInputError(f"exceptional multiplicity for {lam} must be a positive integer")
            exc.append((lam, m))
        exc.sort()
        for (a, _), (b, _) in zip(exc, exc[1:]):
            if a == b:
                raise InvalidInputError(f"exceptional eigenvalue {a} listed twice")
        object.__setattr__(self, "exceptional", tuple(exc))
        if not isinstance(self.kernel_dim, int) or self.kernel_dim < 0:
            raise InvalidInputError("kernel_dim must be a non-negative integer")
        for i, p in enumerate(self.progressions):
            for q in self.progressions[i + 1 :]:
                if p.coincides_with(q):
                    raise InvalidInputError("two progressions share eigenvalues; merge them with union_spectrum")
            for lam, _ in exc:
                if p.index_of(lam) is not None:
                    raise InvalidInputError(f"exceptional eigenvalue {lam} also lies on a progression")

    @property
    def is_empty(self) -> bool:
        return not self.progressions and not self.exceptional and self.kernel_dim == 0

    def multiplicity(self, lam: Fraction | int) -> int:
        return count_eigs(self, Interval.point(lam))

    def to_json(self) -> dict:
        return spectrum_to_json(self)


def sphere_spectrum(n: int) -> SpectrumModel:
    """Dirac spectrum of the round S^(n-1) bounding a flat n-ball.

    Eigenvalues are +-((n-1)/2 + k) with multiplicity 2^floor((n-1)/2) * C(k+n-2, k).
    For n = 2 this is the bounding spin structure on the circle.
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 2 or n % 2:
        raise InvalidDimensionError(f"cone dimension must be an even integer >= 2, got {n!r}")
    # C(k+n-2, n-2) = prod_{i=1}^{n-2} (k+i) / (n-2)!
    coeffs = [Fraction(1)]
    for i in range(1, n - 1):
        coeffs = _poly_mul(coeffs, [Fraction(i), Fraction(1)])
    scale = Fraction(2 ** ((n - 1) // 2), factorial(n - 2))
    mult = MultiplicityPolynomial(tuple(c * scale for c in coeffs))
    a = Fraction(n - 1, 2)
    return SpectrumModel((EigenvalueProgression(1, a, mult), EigenvalueProgression(-1, a, mult)))


def scale_spectrum(s: SpectrumModel, c: Fraction | int | str) -> SpectrumModel:
    """Divide every eigenvalue by the positive rational ``c``."""
    c = parse_rational(c, what="scale")
    if c <= 0:
        raise InvalidInputError("scale factor must be positive")
    return SpectrumModel(
        tuple(EigenvalueProgression(p.sign, p.offset / c, p.multiplicity, p.step / c) for p in s.progressions),
        tuple((lam / c, m) for lam, m in s.exceptional),
        s.kernel_dim,
    )


def union_spectrum(a: SpectrumModel, b: SpectrumModel, cap: int = DEFAULT_ENUMERATION_CAP) -> SpectrumModel:
    """Multiset union, merging coinciding eigenvalues."""
    progs = list(a.progressions) + list(b.progressions)
    extra: dict[Fraction, int] = defaultdict(int)
    for lam, m in a.exceptional + b.exceptional:
        extra[lam] += m

    merged = True
    while merged:
        merged = False
        for i in range(len(progs)):
            for j in range(i + 1, len(progs)):
                if progs[i].coincides_with(progs[j]):
                    p, q = progs[i], progs[j]
                    del progs[j], progs[i]
                    progs.extend(_merge_pair(p, q, extra))
                    merged = True
                    break
            if merged:
                break

    # exceptional eigenvalues that land on a progression: peel the head off
    changed = True
    while changed:
        changed = False
        for idx, p in enumerate(progs):
            hits = [k for k in (p.index_of(lam) for lam in extra) if k is not None]
            if not hits:
                continue
            kmax = max(hits)
            if kmax >= cap:
                raise EnumerationLimitError(f"merging would enumerate {kmax} progression terms")
            for k in range(kmax + 1):
                m = p.multiplicity(k)
                if m:
                    extra[p.eigenvalue(k)] += m
            progs[idx] = p.drop_head(kmax + 1)
            changed = True
            break

    return SpectrumModel(tuple(progs), tuple(sorted(extra.items())), a.kernel_dim + b.kernel_dim)


def _merge_pair(
    p: EigenvalueProgression, q: EigenvalueProgression, extra: dict[Fraction, int]
) -> list[EigenvalueProgression]:
    step = rational_lcm(p.step, q.step)
    ps = p.split(int(step / p.step))
    qs = q.split(int(step / q.step))
    out: list[EigenvalueProgression] = []
    for sub_q in qs:
        partner = next((sp for sp in ps if sp.coincides_with(sub_q)), None)
        if partner is None:
            out.append(sub_q)
            continue
        ps.remove(partner)
        lo, hi = (partner, sub_q) if partner.offset <= sub_q.offset else (sub_q, partner)
        d = int((hi.offset - lo.offset) / step)
        for k in range(d):
            m = lo.multiplicity(k)
            if m:
                extra[lo.eigenvalue(k)] += m
        out.append(
            EigenvalueProgression(lo.sign, hi.offset, lo.multiplicity.shifted(d) + hi.multiplicity, step)
        )
    out.extend(ps)
    return out


def union_all(spectra: Iterable[SpectrumModel]) -> SpectrumModel:
    acc = SpectrumModel()
    for s in spectra:
        acc = union_spectrum(acc, s)
    return acc


def count_eigs(s: SpectrumModel, interval: Interval) -> int:
    """N(I): total multiplicity of eigenvalues in ``interval``."""
    if interval.is_empty:
        return 0
    total = sum(p.count(interval) for p in s.progressions)
    total += sum(m for lam, m in s.exceptional if interval.contains(lam))
    if interval.contains(Fraction(0)):
        total += s.kernel_dim
    return total


def enumerate_eigs(
    s: SpectrumModel, interval: Interval, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[tuple[Fraction, int]]:
    """Sorted ``(eigenvalue, multiplicity)`` pairs inside ``interval``."""
    if interval.is_empty:
        return []
    acc: dict[Fraction, int] = defaultdict(int)
    for p in s.progressions:
        for lam, m in p.enumerate(interval, cap):
            acc[lam] += m
    for lam, m in s.exceptional:
        if interval.contains(lam):
            acc[lam] += m
    if s.kernel_dim and interval.contains(Fraction(0)):
        acc[Fraction(0)] += s.kernel_dim
    return sorted(acc.items())


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def spectrum_to_json(s: SpectrumModel) -> dict:
    progs = []
    for p in s.progressions:
        entry = {
            "sign": p.sign,
            "offset": format_rational(p.offset),
            "multiplicity_coeffs": [format_rational(c) for c in p.multiplicity.coefficients],
        }
        if p.step != 1:
            entry["step"] = format_rational(p.step)
        progs.append(entry)
    return {
        "progressions": progs,
        "exceptional": [{"eigenvalue": format_rational(lam), "multiplicity": m} for lam, m in s.exceptional],
        "kernel_dim": s.kernel_dim,
    }


def spectrum_from_json(data: object) -> SpectrumModel:
    if not isinstance(data, dict):
        raise InvalidInputError("spectrum must be a JSON object")
    unknown = set(data) - {"progressions", "exceptional", "kernel_dim"}
    if unknown:
        raise InvalidInputError(f"unknown spectrum fields: {sorted(unknown)}")
    try:
        progs = tuple(
            EigenvalueProgression(
                int(p["sign"]),
                parse_rational(p["offset"], what="offset"),
                MultiplicityPolynomial(tuple(p["multiplicity_coeffs"])),
                parse_rational(p.get("step", 1), what="step"),
            )
            for p in data.get("progressions", [])
        )
        exc = tuple(
            (parse_rational(e["eigenvalue"], what="eigenvalue"), e["multiplicity"])
            for e in data.get("exceptional", [])
        )
    except (KeyError, TypeError) as exc_info:
        raise InvalidInputError(f"malformed spectrum entry: {exc_info}") from None
    return SpectrumModel(progs, exc, data.get("kernel_dim", 0))
