from __future__ import annotations

import random
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _gen import integral_ahat, random_exponents, random_spectrum
from cone_index.errors import InvalidInputError
from cone_index.index_core import (
    CalderonModel,
    ConeProblem,
    Regime,
    VariantFlag,
    aps_index,
    calderon_dim,
    index_lpq,
)
from cone_index.mode_analysis import (
    ModeSide,
    ModeSolution,
    closure_admits,
    cokernel_modes,
    cokernel_rate,
    kernel_cokernel_dims,
    kernel_modes,
    kernel_rate,
    lw_bounded,
    lw_norm_truncated,
    mode_in_lw,
)
from cone_index.spectra import Interval, SpectrumModel, count_eigs, sphere_spectrum

S2 = sphere_spectrum(2)
RATES = [F(-2), F(-1), F(-1, 2), F(0), F(1, 2), F(1)]
WS = [F(3, 2), F(2), F(3), F(7)]


def test_rate_examples():
    assert cokernel_rate(F(1, 2), F(1, 2)) == 0
    assert cokernel_rate(F(-1, 2), F(1, 2)) == -1
    assert cokernel_rate(F(3, 2), F(1, 2)) == 1
    assert kernel_rate(F(1, 2), F(1, 2)) == -1
    assert kernel_rate(F(-1, 2), F(1, 2)) == 0
    a1 = F(2, 7)
    assert kernel_rate(-a1, a1) == 0


@settings(max_examples=200, deadline=None)
@given(
    lam=st.fractions(-10, 10, max_denominator=12),
    a1=st.fractions(-3, 3, max_denominator=12),
    a2=st.fractions(-3, 3, max_denominator=12),
)
def test_rate_relation(lam, a1, a2):
    assert cokernel_rate(lam, a2) == lam - a2
    assert kernel_rate(lam, a1) == -(lam + a1)
    assert cokernel_rate(lam, a2) + kernel_rate(lam, a1) == -(a1 + a2)
    assert cokernel_rate(lam, a2) + kernel_rate(-lam, a1) == 2 * lam - (a1 + a2)


def test_mode_solution_constructors():
    k = ModeSolution.kernel(F(3, 2), F(1, 2))
    c = ModeSolution.cokernel(F(3, 2), F(1, 2))
    assert k.side is ModeSide.KERNEL and k.rate == -2 and k.integrable
    assert c.side is ModeSide.COKERNEL and c.rate == 1 and not c.integrable
    assert ModeSolution.cokernel(F(3, 2), F(1, 2), coefficient_nonzero=False).integrable


def test_mode_in_lw_examples():
    assert mode_in_lw(-1)
    assert not mode_in_lw(0)
    assert not mode_in_lw(1)
    assert not lw_bounded(1, 2, 20)


def test_truncated_norm_saturates_for_decay():
    ratio = lw_norm_truncated(-1, 2, 40.0) / lw_norm_truncated(-1, 2, 20.0)
    assert abs(ratio - 1) <= 1e-6


@pytest.mark.parametrize("rate", RATES)
@pytest.mark.parametrize("w", WS)
def test_truncated_norm_matches_quadrature(rate, w):
    for T in (1.0, 5.0, 20.0):
        integral = mpmath.quad(lambda t: mpmath.exp(float(w * rate) * t), [0, T])
        expected = float(integral ** (1 / mpmath.mpf(float(w))))
        assert lw_norm_truncated(rate, w, T) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("rate", RATES)
@pytest.mark.parametrize("w", WS)
@pytest.mark.parametrize("T", [20.0, 40.0])
def test_membership_is_sign_of_rate(rate, w, T):
    assert mode_in_lw(rate) == lw_bounded(rate, w, T) == (rate < 0)


def test_truncated_norm_argument_checks():
    with pytest.raises(InvalidInputError):
        lw_norm_truncated(-1, 1, 10.0)
    with pytest.raises(InvalidInputError):
        lw_norm_truncated(-1, 2, 0.0)


def test_closure_admits_examples():
    assert closure_admits(F(1, 2), F(1, 2), 1)
    assert not closure_admits(0, F(1, 2), 1)
    # second regime: alpha1 = alpha2 = -1/6
    for lam in (F(1, 5), F(1, 2), F(7, 2)):
        assert closure_admits(lam, F(-1, 6), F(-1, 3))
    with pytest.raises(InvalidInputError):
        closure_admits(F(-1, 2), F(1, 2), 1)


def test_cokernel_count_matches_spectral_count():
    rng = random.Random(31)
    for _ in range(40):
        s = random_spectrum(rng)
        a2 = F(rng.randint(-20, 20), rng.randint(1, 6))
        lower = a2 - rng.randint(1, 6)
        admissible = sum(m for mode, m in cokernel_modes(s, a2, lower) if mode_in_lw(mode.rate))
        assert admissible == count_eigs(s, Interval.half_open(lower, a2))


def test_kernel_modes_admission():
    modes = kernel_modes(S2, F(1, 2), F(1, 2), 3)
    # eigenvalues above -1/2 up to 3: 1/2, 3/2, 5/2 admitted; nothing strictly between -1/2 and 1/2
    assert [(m.eigenvalue, mult, ok) for m, mult, ok in modes] == [
        (F(1, 2), 1, True),
        (F(3, 2), 1, True),
        (F(5, 2), 1, True),
    ]
    extra = SpectrumModel(S2.progressions, ((F(1, 4), 2),))
    got = {m.eigenvalue: ok for m, _, ok in kernel_modes(extra, F(1, 2), F(1, 2), 1)}
    assert got[F(1, 4)] is False and got[F(1, 2)] is True


# -- kernel/cokernel dimensions ------------------------------------------------


def test_dims_first_regime_pass_through():
    prob = ConeProblem(2, 2, 2, 2, S2, CalderonModel.fictitious(2))
    assert aps_index(2, S2, F(1, 2)).index == 2
    assert kernel_cokernel_dims(prob, (3, 1)) == (3, 1)


def test_dims_second_regime_subtracts_calderon():
    s = SpectrumModel(S2.progressions, ((F(1, 10), 2),))
    cal = CalderonModel.from_table([(Interval.closed(F(-1, 6), F(1, 6)), 2)])
    prob = ConeProblem(2, 6, F(6, 5), 1, s, cal)
    assert prob.regime is Regime.CALDERON
    assert calderon_dim(cal, Interval.closed(F(-1, 6), F(1, 6)), s) == 2
    k, c = kernel_cokernel_dims(prob, (3, 1))
    assert (k, c) == (1, 1) and k - c == index_lpq(prob).index == 0


def test_dims_fictitious_cross_path():
    prob = ConeProblem(2, F(3, 2), 3, 0, S2, CalderonModel.fictitious(2))
    assert aps_index(0, S2, F(5, 6)).index == -1
    k, c = kernel_cokernel_dims(prob, (0, 1))
    assert k - c == -1 == index_lpq(prob).index


def test_dims_reject_inconsistent_input():
    prob = ConeProblem(2, 2, 2, 2, S2)
    with pytest.raises(InvalidInputError):
        kernel_cokernel_dims(prob, (1, 1))
    with pytest.raises(InvalidInputError):
        kernel_cokernel_dims(prob, (-1, -3))
    s = SpectrumModel(S2.progressions, ((F(1, 10), 2),))
    cal = CalderonModel.from_table([(Interval.closed(F(-1, 6), F(1, 6)), 2)])
    # APS index 1 at the cut, Calderon term 2: no consistent kernel dimension (1, 0)
    with pytest.raises(InvalidInputError):
        kernel_cokernel_dims(ConeProblem(2, 6, F(6, 5), 0, s, cal), (1, 0))


def test_dims_theorem_stated_variant_uses_alternate():
    s = SpectrumModel(S2.progressions, ((F(1, 10), 2),))
    cal = CalderonModel.from_table([(Interval.closed(F(-1, 6), F(1, 6)), 2)])
    prob = ConeProblem(2, 6, F(6, 5), 1, s, cal, VariantFlag.THEOREM_STATED)
    r = index_lpq(prob)
    assert not r.variant_agrees
    k, c = kernel_cokernel_dims(prob, (3, 1))
    assert k - c == r.alternate_index


def _consistent_dims(prob: ConeProblem, rng: random.Random) -> tuple[int, int]:
    a1, a2 = prob.exponents
    target = aps_index(prob.ahat, prob.boundary, a2).index
    need = calderon_dim(prob.calderon, Interval.closed(a2, -a1), prob.boundary) if prob.regime is Regime.CALDERON else 0
    k_minus = max(rng.randint(0, 4), need - target, -target)
    return target + k_minus, k_minus


def test_cross_path_random_both_regimes():
    rng = random.Random(77)
    seen = {Regime.APS: 0, Regime.CALDERON: 0}
    for i in range(80):
        s = random_spectrum(rng)
        ahat = integral_ahat(s, rng)
        n = rng.choice([2, 4])
        p, q = random_exponents(rng, n, "aps" if i % 2 else "calderon")
        prob = ConeProblem(n, p, q, ahat, s)
        k, c = kernel_cokernel_dims(prob, _consistent_dims(prob, rng))
        assert k - c == index_lpq(prob).index
        seen[prob.regime] += 1
    assert seen[Regime.APS] and seen[Regime.CALDERON]
