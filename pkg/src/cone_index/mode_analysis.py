"""Separation of variables on the cylindrical end.

After the conformal change the end is the half-cylinder ``t >= 0`` over the
link. A solution of the adjoint equation has modes ``e^{(lam - alpha2) t}``,
a solution of ``D+`` has modes ``e^{-(lam + alpha1) t}`` (only for
``lam > -alpha1``). Integrability and closure-domain admission reduce to sign
conditions on these rates, which turns kernel and cokernel dimensions of the
conical operator into those of APS problems on the truncated manifold.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConsistencyError, InvalidInputError
from .index_core import ConeProblem, Regime, VariantFlag, aps_index, calderon_dim, index_lpq
from .rational import format_rational, parse_rational
from .spectra import Interval, SpectrumModel, enumerate_eigs

#: relative growth between T and 2T below which a truncated norm counts as saturated
SATURATION_TOL = 1e-6


class ModeSide(enum.Enum):
    KERNEL = "kernel"
    COKERNEL = "cokernel"


@dataclass(frozen=True)
class ModeSolution:
    eigenvalue: Fraction
    side: ModeSide
    rate: Fraction
    coefficient_nonzero: bool = True

    @classmethod
    def kernel(cls, lam: Fraction, alpha1: Fraction, coefficient_nonzero: bool = True) -> ModeSolution:
        return cls(lam, ModeSide.KERNEL, kernel_rate(lam, alpha1), coefficient_nonzero)

    @classmethod
    def cokernel(cls, lam: Fraction, alpha2: Fraction, coefficient_nonzero: bool = True) -> ModeSolution:
        return cls(lam, ModeSide.COKERNEL, cokernel_rate(lam, alpha2), coefficient_nonzero)

    @property
    def integrable(self) -> bool:
        return not self.coefficient_nonzero or mode_in_lw(self.rate)


def cokernel_rate(lam: object, alpha2: object) -> Fraction:
    return parse_rational(lam, what="eigenvalue") - parse_rational(alpha2, what="alpha2")


def kernel_rate(lam: object, alpha1: object) -> Fraction:
    return -(parse_rational(lam, what="eigenvalue") + parse_rational(alpha1, what="alpha1"))


def mode_in_lw(rate: object) -> bool:
    """Whether a nonzero mode ``e^{rate t}`` is w-integrable on the half-cylinder.

    Independent of w in (1, inf): only strict decay qualifies, the constant
    mode is excluded.
    """
    return parse_rational(rate, what="rate") < 0


def lw_norm_truncated(rate: object, w: object, T: float) -> float:
    """(int_0^T e^{w rate t} dt)^(1/w), in closed form."""
    r = float(parse_rational(rate, what="rate"))
    w = float(parse_rational(w, what="w"))
    if w <= 1:
        raise InvalidInputError("w must exceed 1")
    if T <= 0:
        raise InvalidInputError("T must be positive")
    c = w * r
    integral = T if c == 0 else math.expm1(c * T) / c
    return integral ** (1 / w)


def lw_bounded(rate: object, w: object, T: float = 20.0) -> bool:
    """Numeric classification: the truncated norm saturates between T and 2T."""
    ratio = lw_norm_truncated(rate, w, 2 * T) / lw_norm_truncated(rate, w, T)
    return ratio - 1 <= SATURATION_TOL


def closure_admits(lam: object, alpha2: object, regime_sum: object) -> bool:
    """Whether a kernel mode at ``lam`` may be nonzero for elements of the closure domain.

    Modes strictly below ``alpha2`` must vanish; ``lam = alpha2`` is admitted.
    When ``regime_sum <= 0`` every present mode already has ``lam > -alpha1 >= alpha2``.
    """
    lam = parse_rational(lam, what="eigenvalue")
    alpha2 = parse_rational(alpha2, what="alpha2")
    regime_sum = parse_rational(regime_sum, what="regime_sum")
    alpha1 = regime_sum - alpha2
    if lam <= -alpha1:
        raise InvalidInputError(
            f"eigenvalue {format_rational(lam)} <= -alpha1 = {format_rational(-alpha1)} has no kernel mode"
        )
    if regime_sum <= 0:
        return True
    return lam >= alpha2


def cokernel_modes(s: SpectrumModel, alpha2: object, lower: object) -> list[tuple[ModeSolution, int]]:
    """Cokernel modes for eigenvalues in ``[lower, alpha2 + 1]`` with multiplicities."""
    alpha2 = parse_rational(alpha2, what="alpha2")
    window = Interval.closed(parse_rational(lower, what="lower"), alpha2 + 1)
    return [(ModeSolution.cokernel(lam, alpha2), m) for lam, m in enumerate_eigs(s, window)]


def kernel_modes(
    s: SpectrumModel, alpha1: object, alpha2: object, upper: object
) -> list[tuple[ModeSolution, int, bool]]:
    """Kernel modes for eigenvalues in ``(-alpha1, upper]`` with multiplicity and admission."""
    alpha1 = parse_rational(alpha1, what="alpha1")
    alpha2 = parse_rational(alpha2, what="alpha2")
    upper = parse_rational(upper, what="upper")
    if upper <= -alpha1:
        return []
    out = []
    for lam, m in enumerate_eigs(s, Interval(-alpha1, upper, False, True)):
        out.append((ModeSolution.kernel(lam, alpha1), m, closure_admits(lam, alpha2, alpha1 + alpha2)))
    return out


def kernel_cokernel_dims(prob: ConeProblem, aps_kernel_dims: tuple[int, int]) -> tuple[int, int]:
    """(dim ker of the closure, dim ker of the adjoint) from APS kernels at the cut alpha2.

    ``aps_kernel_dims`` is ``(dim ker D+_APS, dim ker D-_APS)`` at ``alpha2``; these
    depend on the interior and must be supplied. Their difference has to be the
    APS index at ``alpha2``. In the second regime the closure kernel loses the
    Calderon part ``C_[alpha2, -alpha1]``.
    """
    k_plus, k_minus = aps_kernel_dims
    if k_plus < 0 or k_minus < 0:
        raise InvalidInputError("APS kernel dimensions must be non-negative")
    a1, a2 = prob.exponents
    aps = aps_index(prob.ahat, prob.boundary, a2)
    if k_plus - k_minus != aps.index:
        raise InvalidInputError(
            f"APS kernel dims ({k_plus}, {k_minus}) disagree with the APS index {aps.index} at the cut"
        )
    if prob.regime is Regime.APS:
        kernel = k_plus
    else:
        c = calderon_dim(prob.calderon, Interval.closed(a2, -a1), prob.boundary)
        kernel = k_plus - c
        if kernel < 0:
            raise InvalidInputError(f"APS kernel dimension {k_plus} is smaller than the Calderon term {c}")
    cokernel = k_minus
    direct = index_lpq(prob)
    if prob.regime is Regime.CALDERON and prob.variant_flag is not VariantFlag.PROOF_DERIVED:
        expected = direct.alternate_index
    else:
        expected = direct.index
    if kernel - cokernel != expected:
        raise ConsistencyError(
            f"mode count gives index {kernel - cokernel}, closed formula gives {expected}"
        )
    return kernel, cokernel
