"""Random spectra and independent oracles shared by the tests."""

from __future__ import annotations

import random
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import sympy

from cone_index.errors import InvalidInputError
from cone_index.spectra import EigenvalueProgression, MultiplicityPolynomial, SpectrumModel

PROBLEMS_DIR = Path(__file__).resolve().parent.parent / "problems"


def random_rational(rng: random.Random, lo, hi, max_den: int = 8) -> Fraction:
    while True:
        den = rng.randint(1, max_den)
        x = Fraction(rng.randint(int(lo * den) - 1, int(hi * den) + 1), den)
        if lo <= x <= hi:
            return x


def random_spectrum(
    rng: random.Random,
    *,
    max_progs: int = 3,
    max_degree: int = 2,
    steps=(Fraction(1),),
    exceptional: bool = True,
    kernel: bool = True,
) -> SpectrumModel:
    while True:
        progs = []
        for _ in range(rng.randint(1, max_progs)):
            weights = [rng.randint(0, 3) for _ in range(rng.randint(1, max_degree + 1))]
            if not any(weights):
                weights[0] = 1
            progs.append(
                EigenvalueProgression(
                    rng.choice((1, -1)),
                    random_rational(rng, Fraction(1, 8), Fraction(3)),
                    MultiplicityPolynomial.from_binomial_basis(weights),
                    rng.choice(steps),
                )
            )
        exc = {}
        if exceptional:
            for _ in range(rng.randint(0, 2)):
                lam = random_rational(rng, Fraction(-3), Fraction(3))
                if lam:
                    exc[lam] = rng.randint(1, 3)
        try:
            return SpectrumModel(tuple(progs), tuple(exc.items()), rng.randint(0, 2) if kernel else 0)
        except InvalidInputError:
            continue


def brute_eigs(s: SpectrumModel, bound: Fraction) -> dict[Fraction, int]:
    """All eigenvalues with |lam| <= bound, generated term by term from the definition."""
    out: dict[Fraction, int] = defaultdict(int)
    for p in s.progressions:
        k = 0
        while p.offset + k * p.step <= bound:
            m = sum(c * k**j for j, c in enumerate(p.multiplicity.coefficients))
            if m:
                out[p.sign * (p.offset + k * p.step)] += int(m)
            k += 1
    for lam, m in s.exceptional:
        if abs(lam) <= bound:
            out[lam] += m
    if s.kernel_dim:
        out[Fraction(0)] += s.kernel_dim
    return dict(out)


def in_interval(x, lo, hi, lo_closed, hi_closed) -> bool:
    above = x > lo or (lo_closed and x == lo)
    below = x < hi or (hi_closed and x == hi)
    return above and below


def brute_count(s: SpectrumModel, lo, hi, lo_closed=True, hi_closed=False) -> int:
    bound = max(abs(lo), abs(hi)) + 1
    return sum(m for lam, m in brute_eigs(s, bound).items() if in_interval(lam, lo, hi, lo_closed, hi_closed))


_t = sympy.Symbol("t")
_u = sympy.Symbol("u")


@lru_cache(maxsize=None)
def _generic_series(kind: str, order: int):
    f = 1 / (1 - sympy.exp(-_u)) if kind == "geometric" else sympy.exp(_u)
    return sympy.series(f, _u, 0, order + 1).removeO()


@lru_cache(maxsize=None)
def heat_constant_term(prog: EigenvalueProgression) -> Fraction:
    """Constant term at t -> 0 of sum_k m(k) exp(-t (a + k h)).

    For these Dirichlet series the constant term of the exponential-regulated
    sum equals the zeta-regularized value at z = 0, so this is an oracle that
    never touches Hurwitz zeta or Bernoulli polynomials. With x = exp(-h t),
    x d/dx = -(1/h) d/dt, so sum_k k^j x^k is a t-derivative of 1/(1 - x).
    """
    h = sympy.Rational(prog.step.numerator, prog.step.denominator)
    a = sympy.Rational(prog.offset.numerator, prog.offset.denominator)
    coeffs = prog.multiplicity.coefficients
    order = len(coeffs) + 1
    geometric = _generic_series("geometric", order).subs(_u, h * _t)
    damping = _generic_series("exp", order).subs(_u, -a * _t)
    regulated = 0
    term = geometric
    for j, c in enumerate(coeffs):
        if j:
            term = sympy.diff(term, _t) * (-1 / h)
        regulated += sympy.Rational(c.numerator, c.denominator) * term
    const = sympy.expand(regulated * damping).coeff(_t, 0)
    return Fraction(int(const.p), int(const.q))


def eta_oracle(s: SpectrumModel, alpha: Fraction) -> Fraction:
    """eta_[alpha, inf) at z = 0 via heat constant terms plus brute-force flips."""
    total = Fraction(0)
    reach = max([abs(alpha)] + [p.offset for p in s.progressions] + [abs(lam) for lam, _ in s.exceptional]) + 1
    eigs = brute_eigs(s, reach)
    for p in s.progressions:
        total += p.sign * heat_constant_term(p)
    for lam, m in eigs.items():
        on_prog_pos = any(q.sign > 0 and q.index_of(lam) is not None for q in s.progressions)
        on_prog_neg = any(q.sign < 0 and q.index_of(lam) is not None for q in s.progressions)
        if on_prog_pos and lam < alpha:
            total -= 2 * m
        elif on_prog_neg and lam >= alpha:
            total += 2 * m
        elif not (on_prog_pos or on_prog_neg):
            total += m if lam >= alpha else -m
    return total


def integral_ahat(s: SpectrumModel, rng: random.Random) -> Fraction:
    """An ahat that makes every cut total integral: integer minus half the extended eta."""
    from cone_index.zeta_eta import extended_eta

    return rng.randint(-3, 3) - extended_eta(s).value / 2


def random_exponents(rng: random.Random, n: int, regime: str | None = None) -> tuple[Fraction, Fraction]:
    """(p, q) in (1, 10]; regime "aps" or "calderon" selects the sign of 1 + n/p - n/q."""
    while True:
        p = random_rational(rng, Fraction(11, 10), Fraction(10), 10)
        q = random_rational(rng, Fraction(11, 10), Fraction(10), 10)
        total = 1 + Fraction(n) / p - Fraction(n) / q
        if regime is None or (regime == "aps") == (total > 0):
            return p, q
