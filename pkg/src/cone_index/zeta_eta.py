"""Generalized eta invariants of boundary spectra at z = 0.

For the cut ``I = [alpha, inf)`` each eigenvalue contributes ``+|lambda|^-z``
when it lies in ``I`` and ``-|lambda|^-z`` otherwise; the kernel contributes
with ``0^z := 1``. A progression ``sign*(a + k h)`` with multiplicity ``m(k)``
is rewritten as a polynomial in ``x = a/h + k`` so that its regularized sum is
a finite combination of Hurwitz zeta values at non-positive integers. Only
finitely many eigenvalues carry the weight opposite to their progression's
tail; those are corrected by counting.

:func:`hurwitz_zeta_numeric` is an independent Euler-Maclaurin continuation
used to check the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .bernoulli import DEFAULT_DEGREE_CAP, bernoulli_polynomial
from .errors import ConvergenceError, InvalidInputError, PoleError
from .rational import format_rational, format_real, parse_rational
from .spectra import Interval, SpectrumModel, count_eigs

__all__ = [
    "EtaValue",
    "bernoulli_polynomial",
    "hurwitz_zeta_nonpositive",
    "hurwitz_zeta_numeric",
    "eta_reg",
    "eta_shift",
    "extended_eta",
]


@dataclass(frozen=True)
class EtaValue:
    value: Fraction | float
    exact: bool
    trace: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.exact and not isinstance(self.value, Fraction):
            raise InvalidInputError("an exact eta value must be a rational")

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        tag = "exact" if self.exact else "approx"
        return f"{format_real(self.value)} ({tag})"


def hurwitz_zeta_nonpositive(j: int, a: Fraction | int | str, *, cap: int = DEFAULT_DEGREE_CAP) -> Fraction:
    """zeta_H(-j, a) = -B_{j+1}(a) / (j+1)."""
    a = parse_rational(a, what="Hurwitz parameter")
    if a <= 0:
        raise InvalidInputError("Hurwitz parameter must be positive")
    if j < 0:
        raise InvalidInputError("j must be non-negative")
    return -bernoulli_polynomial(j + 1, a, cap=cap) / (j + 1)


def hurwitz_zeta_numeric(s: float, a: float, *, tol: float = 1e-10, dps: int = 40) -> float:
    """zeta_H(s, a) by Euler-Maclaurin summation, valid for every real s != 1.

    The partial sum runs to ``N`` terms, followed by the integral tail and the
    Bernoulli corrections ``B_2j/(2j)! * (s)_{2j-1} * (a+N)^(1-s-2j)``. ``N``
    grows until the correction series drops below ``tol``. Working precision is
    ``dps`` decimal digits so that cancellation in the partial sums at negative
    ``s`` does not eat the target accuracy.
    """
    s_f, a_f = float(s), float(a)
    if a_f <= 0:
        raise InvalidInputError("Hurwitz parameter must be positive")
    if s_f == 1.0:
        raise PoleError("zeta_H(s, a) has a pole at s = 1")
    with mpmath.workdps(dps):
        s_m, a_m = mpmath.mpf(s_f), mpmath.mpf(a_f)
        target = mpmath.mpf(tol) / 100
        n_terms = max(0, int(abs(s_f)) + 4 - int(a_f))
        for _ in range(12):
            value, converged = _euler_maclaurin(s_m, a_m, n_terms, target)
            if converged:
                return float(value)
            n_terms = 2 * n_terms + 8
    raise ConvergenceError(f"Euler-Maclaurin did not reach {tol} for s={s}, a={a}")


def _euler_maclaurin(s, a, n_terms: int, target, max_order: int = 60):
    x = a + n_terms
    total = mpmath.fsum((a + k) ** (-s) for k in range(n_terms))
    total += x ** (1 - s) / (s - 1) + x ** (-s) / 2
    previous = None
    for j in range(1, max_order + 1):
        rising = mpmath.rf(s, 2 * j - 1)
        term = mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) * rising * x ** (1 - s - 2 * j)
        total += term
        mag = abs(term)
        if rising == 0 or mag < target:
            return total, True
        if previous is not None and mag > previous:
            # asymptotic series started diverging before reaching the target
            return total, False
        previous = mag
    return total, False


def _progression_regular_sum(prog, trace: list[str]) -> Fraction:
    """Regularized sum_k m(k) (a + k h)^-z at z = 0."""
    base = prog.offset / prog.step
    coeffs = prog.multiplicity.shift(-base)  # m as a polynomial in x = base + k
    total = Fraction(0)
    for j, c in enumerate(coeffs):
        if c == 0:
            continue
        z = hurwitz_zeta_nonpositive(j, base)
        total += c * z
        trace.append(
            f"  {format_rational(c)} * zeta_H(-{j}, {format_rational(base)}) = "
            f"{format_rational(c)} * {format_rational(z)}"
        )
    return total


def eta_reg(s: SpectrumModel, alpha: Fraction | int | str) -> EtaValue:
    r"""eta_{[alpha, inf)} of the spectrum at z = 0, exactly."""
    alpha = parse_rational(alpha, what="cut")
    cut = Interval.at_least(alpha)
    below = Interval.below(alpha)
    trace: list[str] = [f"eta_[{format_rational(alpha)},inf)"]
    total = Fraction(0)
    for prog in s.progressions:
        lead = "+" if prog.sign > 0 else "-"
        trace.append(
            f"progression {lead}({format_rational(prog.offset)} + {format_rational(prog.step)}k):"
        )
        z = _progression_regular_sum(prog, trace)
        total += prog.sign * z
        # finitely many eigenvalues sit on the other side of the cut from the tail
        if prog.sign > 0:
            flipped = prog.count(below)
            total -= 2 * flipped
        else:
            flipped = prog.count(cut)
            total += 2 * flipped
        trace.append(f"  tail weight {lead}1, flipped across cut: {flipped}")
    for lam, m in s.exceptional:
        w = 1 if lam >= alpha else -1
        total += w * m
        trace.append(f"exceptional {format_rational(lam)} x{m}: {w:+d} each")
    if s.kernel_dim:
        w = 1 if alpha <= 0 else -1
        total += w * s.kernel_dim
        trace.append(f"kernel x{s.kernel_dim}: {w:+d} each (0^z = 1)")
    trace.append(f"= {format_rational(total)}")
    return EtaValue(total, True, tuple(trace))


def eta_shift(
    s: SpectrumModel,
    alpha: Fraction | int | str,
    beta: Fraction | int | str,
    base: EtaValue,
) -> EtaValue:
    """eta at cut ``alpha`` from its value at ``beta > alpha``: base + 2 N[alpha, beta)."""
    alpha = parse_rational(alpha, what="alpha")
    beta = parse_rational(beta, what="beta")
    if not alpha < beta:
        raise InvalidInputError("eta_shift requires alpha < beta")
    n = count_eigs(s, Interval.half_open(alpha, beta))
    trace = base.trace + (
        f"shift to {format_rational(alpha)}: + 2 * N[{format_rational(alpha)},{format_rational(beta)}) = + 2 * {n}",
    )
    return EtaValue(base.value + 2 * n, base.exact, trace)


def extended_eta(s: SpectrumModel) -> EtaValue:
    """The cut-at-zero eta, counting the kernel with weight +1."""
    return eta_reg(s, 0)
