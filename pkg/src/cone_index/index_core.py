"""Index formulas for the chiral Dirac operator on a conical manifold, L^p -> L^q.

With ``alpha1 = n/p - (n-1)/2`` and ``alpha2 = (n+1)/2 - n/q``:

* ``alpha1 + alpha2 > 0``: index = ahat + eta_[alpha2, inf) / 2
* ``alpha1 + alpha2 <= 0``: a Calderon correction ``dim C_[alpha2, -alpha1]`` is
  subtracted. The eta cut in this branch is ambiguous: assembling the
  kernel/cokernel reduction gives ``alpha2``, while the closed statement prints
  ``-alpha1``. Both are available through :class:`VariantFlag`; they differ by
  ``N[alpha2, -alpha1)`` and so coincide on gapped boundaries.

``ahat`` (the integral of the A-hat form) is an input scalar.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Union

from .errors import (
    CalderonBoundError,
    ConsistencyError,
    IntegralityError,
    InvalidDimensionError,
    InvalidInputError,
    MissingTableEntryError,
)
from .rational import format_rational, format_real, parse_rational, parse_real
from .spectra import (
    Interval,
    SpectrumModel,
    count_eigs,
    enumerate_eigs,
    sphere_spectrum,
    spectrum_from_json,
    spectrum_to_json,
    union_all,
)
from .zeta_eta import eta_reg, extended_eta

Real = Union[Fraction, float]

#: tolerance for declaring a float-valued total integral
FLOAT_INTEGRALITY_TOL = 1e-9


class Regime(enum.Enum):
    APS = "APS"
    CALDERON = "CALDERON"


class VariantFlag(enum.Enum):
    PROOF_DERIVED = "proof-derived"
    THEOREM_STATED = "theorem-stated"


class CalderonVariant(enum.Enum):
    ZERO = "zero"
    TABLE = "table"
    FICTITIOUS = "fictitious"


def _check_dimension(n: object) -> int:
    if not isinstance(n, int) or isinstance(n, bool) or n < 2 or n % 2:
        raise InvalidDimensionError(f"cone dimension must be an even integer >= 2, got {n!r}")
    return n


def _exponent(p: object, name: str) -> Fraction:
    p = parse_rational(p, what=name)
    if p <= 1:
        raise InvalidInputError(f"{name} must exceed 1, got {format_rational(p)}")
    return p


# ---------------------------------------------------------------------------
# Calderon model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CalderonModel:
    """Dimensions of ``C cap Ran(Pi_I)`` modulo the part above ``I``, for finite ``I``.

    ``ZERO`` is the trivial model. ``TABLE`` answers from explicit entries; an
    interval matches an entry when both contain the same boundary eigenvalues,
    since the quotient only sees those eigenspaces. ``FICTITIOUS`` models the
    flat points of a closed manifold: only the eigenvalue ``(n-1)/2`` carries
    boundary values of solutions (restrictions of parallel positive spinors),
    ``2^floor((n-1)/2)`` per point.
    """

    variant: CalderonVariant = CalderonVariant.ZERO
    table: tuple[tuple[Interval, int], ...] = ()
    n: int | None = None
    points: int = 1

    def __post_init__(self) -> None:
        if self.variant is CalderonVariant.FICTITIOUS:
            _check_dimension(self.n)
        if not isinstance(self.points, int) or self.points < 1:
            raise InvalidInputError("points must be a positive integer")
        for iv, d in self.table:
            if not iv.is_bounded:
                raise InvalidInputError(f"Calderon table interval {iv} must be finite")
            if not isinstance(d, int) or d < 0:
                raise InvalidInputError("Calderon table dimensions must be non-negative integers")
        for iv, d in self.table:
            for jv, e in self.table:
                if jv.contains_interval(iv) and d > e:
                    raise InvalidInputError(
                        f"Calderon table not monotone: dim{iv} = {d} > dim{jv} = {e}"
                    )

    @classmethod
    def zero(cls) -> CalderonModel:
        return cls()

    @classmethod
    def fictitious(cls, n: int, points: int = 1) -> CalderonModel:
        return cls(CalderonVariant.FICTITIOUS, n=n, points=points)

    @classmethod
    def from_table(cls, entries) -> CalderonModel:
        return cls(CalderonVariant.TABLE, table=tuple((iv, int(d)) for iv, d in entries))

    def raw_dim(self, interval: Interval, s: SpectrumModel) -> int:
        if not interval.is_bounded:
            raise InvalidInputError("Calderon dimensions are defined for finite intervals")
        if interval.is_empty or self.variant is CalderonVariant.ZERO:
            return 0
        if self.variant is CalderonVariant.FICTITIOUS:
            if interval.contains(Fraction(self.n - 1, 2)):
                return self.points * 2 ** ((self.n - 1) // 2)
            return 0
        content = enumerate_eigs(s, interval)
        if not content:
            return 0
        for iv, d in self.table:
            if iv == interval or enumerate_eigs(s, iv) == content:
                return d
        raise MissingTableEntryError(f"no Calderon table entry with the eigenvalues of {interval}")

    def dim(self, interval: Interval, s: SpectrumModel) -> int:
        d = self.raw_dim(interval, s)
        bound = count_eigs(s, interval)
        if d > bound:
            raise CalderonBoundError(f"dim C{interval} = {d} exceeds N{interval} = {bound}")
        return d

    def h_infinity(self, s: SpectrumModel) -> int:
        """Dimension of the limiting values of extended L^2 solutions, dim C_{0}."""
        return self.dim(Interval.point(0), s)

    def to_json(self) -> dict:
        out: dict = {"variant": self.variant.value}
        if self.variant is CalderonVariant.TABLE:
            out["table"] = [
                {
                    "lo": format_rational(iv.lower),
                    "hi": format_rational(iv.upper),
                    "lo_closed": iv.lower_closed,
                    "hi_closed": iv.upper_closed,
                    "dim": d,
                }
                for iv, d in self.table
            ]
        if self.points != 1:
            out["points"] = self.points
        return out


def calderon_dim(model: CalderonModel, interval: Interval, s: SpectrumModel) -> int:
    return model.dim(interval, s)


# ---------------------------------------------------------------------------
# Problem and result types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConeProblem:
    n: int
    p: Fraction
    q: Fraction
    ahat: Real
    boundary: SpectrumModel
    calderon: CalderonModel = field(default_factory=CalderonModel)
    variant_flag: VariantFlag = VariantFlag.PROOF_DERIVED

    def __post_init__(self) -> None:
        _check_dimension(self.n)
        object.__setattr__(self, "p", _exponent(self.p, "p"))
        object.__setattr__(self, "q", _exponent(self.q, "q"))
        object.__setattr__(self, "ahat", parse_real(self.ahat, what="ahat"))
        a1, a2 = self.exponents
        half = Fraction(self.n - 1, 2)
        assert -half < a1 < half + 1, "alpha1 out of its range"
        assert -half < a2 < half + 1, "alpha2 out of its range"

    @property
    def exponents(self) -> tuple[Fraction, Fraction]:
        return exponent_pair(self.n, self.p, self.q)

    @property
    def regime_sum(self) -> Fraction:
        a1, a2 = self.exponents
        return a1 + a2

    @property
    def regime(self) -> Regime:
        return Regime.APS if self.regime_sum > 0 else Regime.CALDERON

    def with_exponents(self, p: Fraction, q: Fraction) -> ConeProblem:
        return replace(self, p=p, q=q)


@dataclass(frozen=True)
class IndexTerms:
    ahat: Real
    half_eta: Fraction
    calderon_correction: int
    cut_used: Fraction


@dataclass(frozen=True)
class IndexResult:
    index: int
    regime: Regime
    terms: IndexTerms
    variant_flag: VariantFlag = VariantFlag.PROOF_DERIVED
    #: index under the other second-regime reading; None in the first regime
    alternate_index: int | None = None

    @property
    def variant_agrees(self) -> bool:
        return self.alternate_index is None or self.alternate_index == self.index

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "regime": self.regime.value,
            "variant_flag": self.variant_flag.value,
            "variant_agrees": self.variant_agrees,
            "alternate_index": self.alternate_index,
            "terms": {
                "ahat": format_real(self.terms.ahat),
                "half_eta": format_rational(self.terms.half_eta),
                "calderon_correction": self.terms.calderon_correction,
                "cut_used": format_rational(self.terms.cut_used),
            },
        }


def _integral_total(ahat: Real, half_eta: Fraction, correction: int) -> int:
    total = ahat + half_eta - correction
    if isinstance(total, float):
        r = round(total)
        if not math.isclose(total, r, rel_tol=0, abs_tol=FLOAT_INTEGRALITY_TOL):
            raise IntegralityError(f"index total {total!r} is not an integer")
        return int(r)
    if total.denominator != 1:
        raise IntegralityError(
            f"index total {format_rational(total)} is not an integer "
            f"(ahat={format_real(ahat)}, eta/2={format_rational(half_eta)}, correction={correction})"
        )
    return int(total)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def exponent_pair(n: int, p: object, q: object) -> tuple[Fraction, Fraction]:
    """(alpha1, alpha2); the regime discriminant is their sum, 1 + n/p - n/q."""
    _check_dimension(n)
    p = _exponent(p, "p")
    q = _exponent(q, "q")
    return Fraction(n) / p - Fraction(n - 1, 2), Fraction(n + 1, 2) - Fraction(n) / q


def dual_exponent(p: object) -> Fraction:
    p = _exponent(p, "p")
    return p / (p - 1)


def aps_index(ahat: object, s: SpectrumModel, alpha: object) -> IndexResult:
    """Index of the APS problem with boundary projection onto ``[alpha, inf)``."""
    ahat = parse_real(ahat, what="ahat")
    alpha = parse_rational(alpha, what="cut")
    half_eta = eta_reg(s, alpha).value / 2
    return IndexResult(
        _integral_total(ahat, half_eta, 0), Regime.APS, IndexTerms(ahat, half_eta, 0, alpha)
    )


def index_lpq(prob: ConeProblem) -> IndexResult:
    a1, a2 = prob.exponents
    s = prob.boundary
    if a1 + a2 > 0:
        r = aps_index(prob.ahat, s, a2)
        return replace(r, variant_flag=prob.variant_flag)

    correction = calderon_dim(prob.calderon, Interval.closed(a2, -a1), s)
    cuts = {VariantFlag.PROOF_DERIVED: a2, VariantFlag.THEOREM_STATED: -a1}
    values = {}
    for flag, cut in cuts.items():
        half_eta = eta_reg(s, cut).value / 2
        values[flag] = (_integral_total(prob.ahat, half_eta, correction), half_eta)
    other = (
        VariantFlag.THEOREM_STATED
        if prob.variant_flag is VariantFlag.PROOF_DERIVED
        else VariantFlag.PROOF_DERIVED
    )
    index, half_eta = values[prob.variant_flag]
    return IndexResult(
        index,
        Regime.CALDERON,
        IndexTerms(prob.ahat, half_eta, correction, cuts[prob.variant_flag]),
        prob.variant_flag,
        values[other][0],
    )


def index_symmetric(
    n: int,
    p: object,
    ahat: object,
    s: SpectrumModel,
    calderon: CalderonModel | None = None,
    variant_flag: VariantFlag = VariantFlag.PROOF_DERIVED,
) -> IndexResult:
    """The symmetric problem L^p -> L^p' (p' the dual exponent)."""
    p = _exponent(p, "p")
    prob = ConeProblem(n, p, dual_exponent(p), ahat, s, calderon or CalderonModel(), variant_flag)
    a1, a2 = prob.exponents
    alpha = Fraction(1, 2) + Fraction(n) / p - Fraction(n, 2)
    assert a1 == a2 == alpha
    return index_lpq(prob)


def index_fixed_lp(n: int, p: object, ahat: object, s: SpectrumModel) -> IndexResult:
    """L^p -> L^p: always the first regime, cut at (n+1)/2 - n/p."""
    p = _exponent(p, "p")
    prob = ConeProblem(n, p, p, ahat, s)
    assert prob.regime_sum == 1
    return index_lpq(prob)


def chou_l2_index(ahat: object, s: SpectrumModel, n: int = 2) -> IndexResult:
    """L^2 index: ahat + extended eta / 2 - N[0, 1/2).

    Cross-checked against :func:`index_lpq` at p = q = 2 (the cut 1/2 there
    does not depend on ``n``).
    """
    ahat = parse_real(ahat, what="ahat")
    half_eta = extended_eta(s).value / 2
    low = count_eigs(s, Interval.half_open(0, Fraction(1, 2)))
    index = _integral_total(ahat, half_eta - low, 0)
    direct = index_lpq(ConeProblem(n, 2, 2, ahat, s))
    if direct.index != index:
        raise ConsistencyError(f"L^2 formula gives {index}, L^p,q formula at p=q=2 gives {direct.index}")
    return IndexResult(index, Regime.APS, IndexTerms(ahat, half_eta - low, 0, Fraction(0)))


def fictitious_index(n: int, p: object, closed_index: int, num_points: int = 1) -> int:
    """L^p -> L^p' index on a closed manifold punctured at flat points.

    Equal to the closed index for p >= n/(n-1); below that threshold each point
    removes the 2^floor((n-1)/2) parallel positive spinors.
    """
    _check_dimension(n)
    p = _exponent(p, "p")
    if not isinstance(num_points, int) or num_points < 1:
        raise InvalidInputError("num_points must be a positive integer")
    if p >= Fraction(n, n - 1):
        return closed_index
    return closed_index - num_points * 2 ** ((n - 1) // 2)


def fictitious_problem(n: int, p: object, closed_index: object, num_points: int = 1) -> ConeProblem:
    """Symmetric problem for ``num_points`` flat points (round sphere links)."""
    p = _exponent(p, "p")
    boundary = union_all([sphere_spectrum(n)] * num_points)
    return ConeProblem(
        n, p, dual_exponent(p), closed_index, boundary, CalderonModel.fictitious(n, num_points)
    )


# ---------------------------------------------------------------------------
# Problem files
# ---------------------------------------------------------------------------


def calderon_from_json(data: object, n: int) -> CalderonModel:
    if data is None:
        return CalderonModel()
    if isinstance(data, str):
        data = {"variant": data}
    if not isinstance(data, dict):
        raise InvalidInputError("calderon must be a string or object")
    try:
        variant = CalderonVariant(data.get("variant", "zero"))
    except ValueError:
        raise InvalidInputError(f"unknown Calderon variant {data.get('variant')!r}") from None
    points = data.get("points", 1)
    if variant is CalderonVariant.FICTITIOUS:
        return CalderonModel.fictitious(n, points)
    if variant is CalderonVariant.TABLE:
        try:
            entries = [
                (
                    Interval(
                        parse_rational(e["lo"], what="lo"),
                        parse_rational(e["hi"], what="hi"),
                        bool(e.get("lo_closed", True)),
                        bool(e.get("hi_closed", True)),
                    ),
                    e["dim"],
                )
                for e in data.get("table", [])
            ]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed Calderon table entry: {exc}") from None
        return CalderonModel(CalderonVariant.TABLE, table=tuple(entries), points=points)
    return CalderonModel(points=points)


def problem_from_json(data: object) -> ConeProblem:
    if not isinstance(data, dict):
        raise InvalidInputError("problem must be a JSON object")
    missing = {"n", "p", "q"} - set(data)
    if missing:
        raise InvalidInputError(f"problem is missing fields {sorted(missing)}")
    n = _check_dimension(data["n"])
    spectrum_field = data.get("spectrum", "sphere")
    points = data.get("points", 1)
    if spectrum_field == "sphere":
        if not isinstance(points, int) or points < 1:
            raise InvalidInputError("points must be a positive integer")
        boundary = union_all([sphere_spectrum(n)] * points)
    else:
        boundary = spectrum_from_json(spectrum_field)
    cal = data.get("calderon")
    if isinstance(cal, dict) and "points" not in cal and points != 1:
        cal = {**cal, "points": points}
    elif isinstance(cal, str) and points != 1:
        cal = {"variant": cal, "points": points}
    try:
        flag = VariantFlag(data.get("variant_flag", VariantFlag.PROOF_DERIVED.value))
    except ValueError:
        raise InvalidInputError(f"unknown variant_flag {data.get('variant_flag')!r}") from None
    return ConeProblem(
        n,
        parse_rational(data["p"], what="p"),
        parse_rational(data["q"], what="q"),
        parse_real(data.get("ahat", 0), what="ahat"),
        boundary,
        calderon_from_json(cal, n),
        flag,
    )


def problem_to_json(prob: ConeProblem) -> dict:
    return {
        "n": prob.n,
        "p": format_rational(prob.p),
        "q": format_rational(prob.q),
        "ahat": format_real(prob.ahat),
        "spectrum": spectrum_to_json(prob.boundary),
        "calderon": prob.calderon.to_json(),
        "variant_flag": prob.variant_flag.value,
    }


def load_problem(path: str | Path) -> ConeProblem:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InvalidInputError(f"cannot read problem file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON ({exc})") from None
    return problem_from_json(data)
