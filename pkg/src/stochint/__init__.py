"""Mean-square approximation of iterated Ito and Stratonovich integrals
by truncated series in orthonormal bases, with exact rational coefficient
and error computation and a seeded Monte Carlo validation harness."""

from .orthopoly import (
    BASES,
    DEGREE_CAP,
    LEGENDRE,
    TRIGONOMETRIC,
    DegreeCapError,
    Interval,
    RationalPoly,
    basis_eval,
    basis_integral,
    legendre_poly,
    poly_integrate_from,
)
from .coeffs import (
    CoeffEntry,
    CoefficientTable,
    ENTRY_BUDGET,
    coeff_numeric,
    coeff_table,
    monomial_weights,
    scale_coeff,
    simplex_coeff_exact,
)
from .errors import (
    CLOSED_FORM_NAMES,
    ErrorReport,
    ExactValue,
    IndexPattern,
    TruncationSearchError,
    closed_form_mse,
    exact_mse,
    moment_bound,
    mse_upper_bound,
    norm_squared,
    select_p,
)
from .expansions import (
    CATALOG_WEIGHTS,
    KINDS,
    TRIG_NAMES,
    Correction,
    DrawSet,
    Expansion,
    ExpansionSpec,
    Term,
    alpha_q,
    beta_q,
    build_ito,
    build_strat,
    catalog,
    evaluate,
    hermite_closed_form,
    trig_milstein,
)
from .mc import (
    CHUNK,
    MomentEstimate,
    StreamConfig,
    VALIDATION_CATEGORIES,
    default_workers,
    draw_set,
    mc_moment,
    validate_suite,
)

__version__ = "0.1.0"

__all__ = [
    "BASES",
    "CATALOG_WEIGHTS",
    "CHUNK",
    "CLOSED_FORM_NAMES",
    "CoeffEntry",
    "CoefficientTable",
    "Correction",
    "DEGREE_CAP",
    "DegreeCapError",
    "DrawSet",
    "ENTRY_BUDGET",
    "ErrorReport",
    "ExactValue",
    "Expansion",
    "ExpansionSpec",
    "IndexPattern",
    "Interval",
    "KINDS",
    "LEGENDRE",
    "MomentEstimate",
    "RationalPoly",
    "StreamConfig",
    "TRIGONOMETRIC",
    "TRIG_NAMES",
    "Term",
    "TruncationSearchError",
    "VALIDATION_CATEGORIES",
    "alpha_q",
    "basis_eval",
    "basis_integral",
    "beta_q",
    "build_ito",
    "build_strat",
    "catalog",
    "closed_form_mse",
    "coeff_numeric",
    "coeff_table",
    "default_workers",
    "draw_set",
    "evaluate",
    "exact_mse",
    "hermite_closed_form",
    "legendre_poly",
    "mc_moment",
    "moment_bound",
    "monomial_weights",
    "mse_upper_bound",
    "norm_squared",
    "poly_integrate_from",
    "scale_coeff",
    "select_p",
    "simplex_coeff_exact",
    "trig_milstein",
    "validate_suite",
]
