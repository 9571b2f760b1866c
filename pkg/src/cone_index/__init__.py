"""Index of Dirac operators on manifolds with isolated conical singularities, L^p -> L^q."""

from .errors import *  # noqa: F401,F403
from .index_core import (
    CalderonModel,
    CalderonVariant,
    ConeProblem,
    IndexResult,
    IndexTerms,
    Regime,
    VariantFlag,
    aps_index,
    calderon_dim,
    chou_l2_index,
    dual_exponent,
    exponent_pair,
    fictitious_index,
    fictitious_problem,
    index_fixed_lp,
    index_lpq,
    index_symmetric,
    load_problem,
    problem_from_json,
)
from .spectra import (
    EigenvalueProgression,
    Interval,
    MultiplicityPolynomial,
    SpectrumModel,
    count_eigs,
    enumerate_eigs,
    scale_spectrum,
    sphere_spectrum,
    union_spectrum,
)
from .zeta_eta import (
    EtaValue,
    bernoulli_polynomial,
    eta_reg,
    eta_shift,
    extended_eta,
    hurwitz_zeta_nonpositive,
    hurwitz_zeta_numeric,
)

__version__ = "0.1.0"
