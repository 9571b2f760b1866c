"""Cross-path consistency checks run by ``cone-index verify``.

Each check returns a :class:`CheckResult`; none of them raises on a failed
comparison. Randomized draws come from ``random.Random(seed)`` so a run is
reproducible.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .errors import ComputationError
from .index_core import (
    ConeProblem,
    Regime,
    VariantFlag,
    aps_index,
    calderon_dim,
    chou_l2_index,
    dual_exponent,
    index_fixed_lp,
    index_lpq,
    index_symmetric,
)
from .mode_analysis import (
    cokernel_modes,
    kernel_cokernel_dims,
    lw_bounded,
    mode_in_lw,
)
from .rational import format_rational
from .spectra import Interval, SpectrumModel, count_eigs, enumerate_eigs
from .zeta_eta import eta_reg, hurwitz_zeta_nonpositive, hurwitz_zeta_numeric

ZETA_TOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def random_rational(rng: random.Random, lo: Fraction, hi: Fraction, max_den: int = 12) -> Fraction:
    den = rng.randint(1, max_den)
    lo_num = math.ceil(lo * den)
    hi_num = math.floor(hi * den)
    if hi_num < lo_num:
        return lo
    return Fraction(rng.randint(lo_num, hi_num), den)


def _cut_window(s: SpectrumModel) -> tuple[Fraction, Fraction]:
    """A cut range that covers the low part of the spectrum."""
    marks = [abs(lam) for lam, _ in s.exceptional] + [p.offset for p in s.progressions]
    reach = max(marks, default=Fraction(1)) + 3
    return -reach, reach


def _eigen_or_random(rng: random.Random, s: SpectrumModel, lo: Fraction, hi: Fraction) -> Fraction:
    """Random cut, landing exactly on an eigenvalue a third of the time."""
    if rng.random() < 1 / 3:
        eigs = enumerate_eigs(s, Interval.closed(lo, hi))
        if eigs:
            return rng.choice(eigs)[0]
    return random_rational(rng, lo, hi)


def check_lemma4(s: SpectrumModel, rng: random.Random, trials: int = 200) -> CheckResult:
    lo, hi = _cut_window(s)
    failures = 0
    for _ in range(trials):
        a = _eigen_or_random(rng, s, lo, hi)
        b = _eigen_or_random(rng, s, lo, hi)
        if a == b:
            b = a + Fraction(1, 7)
        a, b = min(a, b), max(a, b)
        lhs = eta_reg(s, a).value - eta_reg(s, b).value
        if lhs != 2 * count_eigs(s, Interval.half_open(a, b)):
            failures += 1
    return CheckResult("eta shift identity", failures == 0, f"{trials - failures}/{trials} cut pairs exact")


def check_zeta_oracle(rng: random.Random, samples: int = 50, max_j: int = 6) -> CheckResult:
    worst = 0.0
    params = [Fraction(1)] + [random_rational(rng, Fraction(1, 100), Fraction(4), 60) for _ in range(samples)]
    params = [a for a in params if a > 0]
    for a in params:
        for j in range(max_j + 1):
            exact = hurwitz_zeta_nonpositive(j, a)
            approx = hurwitz_zeta_numeric(-j, float(a))
            worst = max(worst, abs(float(exact) - approx))
    ok = worst <= ZETA_TOL and hurwitz_zeta_nonpositive(1, 1) == Fraction(-1, 12)
    return CheckResult("zeta closed form vs Euler-Maclaurin", ok, f"max abs error {worst:.2e} (tol {ZETA_TOL:g})")


def _same_outcome(f: Callable[[], object], g: Callable[[], object]) -> bool:
    def run(h):
        try:
            return ("ok", h())
        except ComputationError as exc:
            return ("err", type(exc).__name__)

    return run(f) == run(g)


def check_corollaries(prob: ConeProblem) -> CheckResult:
    n, s, ahat, cal = prob.n, prob.boundary, prob.ahat, prob.calderon
    p_grid = [Fraction(11, 10) + Fraction(k, 4) for k in range(20)]
    bad = []
    for p in p_grid:
        pd = dual_exponent(p)
        if not _same_outcome(
            lambda: index_symmetric(n, p, ahat, s, cal).index,
            lambda: index_lpq(ConeProblem(n, p, pd, ahat, s, cal)).index,
        ):
            bad.append(f"symmetric p={format_rational(p)}")
        if not _same_outcome(
            lambda: index_fixed_lp(n, p, ahat, s).index,
            lambda: index_lpq(ConeProblem(n, p, p, ahat, s, cal)).index,
        ):
            bad.append(f"fixed p={format_rational(p)}")
    if not _same_outcome(
        lambda: chou_l2_index(ahat, s, n).index, lambda: index_lpq(ConeProblem(n, 2, 2, ahat, s)).index
    ):
        bad.append("L2")
    p_aps = Fraction(2 * n, n + 1)
    if not _same_outcome(lambda: index_fixed_lp(n, p_aps, ahat, s).index, lambda: aps_index(ahat, s, 0).index):
        bad.append("APS anchor")
    return CheckResult("corollary consistency", not bad, "all agree" if not bad else ", ".join(bad))


def check_modes(prob: ConeProblem) -> CheckResult:
    a1, a2 = prob.exponents
    s = prob.boundary
    lower = _cut_window(s)[0] - a2
    admissible = sum(m for mode, m in cokernel_modes(s, a2, lower) if mode_in_lw(mode.rate))
    counted = count_eigs(s, Interval(lower, a2, True, False))
    grid_ok = all(
        mode_in_lw(rate) == lw_bounded(rate, w, 20.0)
        for rate in (Fraction(-2), Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1, 2), Fraction(1))
        for w in (Fraction(3, 2), Fraction(2), Fraction(3), Fraction(7))
    )
    ok = admissible == counted and grid_ok
    return CheckResult(
        "mode predicates vs counting",
        ok,
        f"admissible cokernel modes {admissible}, N[{format_rational(lower)},{format_rational(a2)}) = {counted}; "
        f"L^w grid {'ok' if grid_ok else 'mismatch'}",
    )


def _consistent_aps_dims(prob: ConeProblem, rng: random.Random) -> tuple[int, int]:
    a1, a2 = prob.exponents
    target = aps_index(prob.ahat, prob.boundary, a2).index
    need = 0
    if prob.regime is Regime.CALDERON:
        need = calderon_dim(prob.calderon, Interval.closed(a2, -a1), prob.boundary)
    k_minus = rng.randint(0, 4)
    k_minus = max(k_minus, need - target, -target)
    return target + k_minus, k_minus


def check_cross_path(prob: ConeProblem, rng: random.Random, trials: int = 40) -> CheckResult:
    probs = [prob]
    for _ in range(trials):
        p = random_rational(rng, Fraction(11, 10), Fraction(10), 8)
        q = random_rational(rng, Fraction(11, 10), Fraction(10), 8)
        if p > 1 and q > 1:
            probs.append(prob.with_exponents(p, q))
    bad, skipped = [], 0
    for pr in probs:
        pr = ConeProblem(pr.n, pr.p, pr.q, pr.ahat, pr.boundary, pr.calderon, VariantFlag.PROOF_DERIVED)
        try:
            dims = _consistent_aps_dims(pr, rng)
            expected = index_lpq(pr).index
        except ComputationError:
            skipped += 1
            continue
        try:
            k, c = kernel_cokernel_dims(pr, dims)
        except ComputationError as exc:
            bad.append(f"p={format_rational(pr.p)} q={format_rational(pr.q)}: {exc}")
            continue
        if k - c != expected:
            bad.append(f"p={format_rational(pr.p)} q={format_rational(pr.q)}")
    detail = f"{len(probs) - skipped - len(bad)}/{len(probs) - skipped} agree"
    if skipped:
        detail += f" ({skipped} skipped: formula not evaluable)"
    return CheckResult("kernel/cokernel vs closed formula", not bad, detail if not bad else "; ".join(bad))


def run_verification(prob: ConeProblem, seed: int = 0) -> list[CheckResult]:
    rng = random.Random(seed)
    return [
        check_lemma4(prob.boundary, rng),
        check_zeta_oracle(rng),
        check_corollaries(prob),
        check_modes(prob),
        check_cross_path(prob, rng),
    ]
