"""Radial numerical laboratory for ``Δ^m u = ±u^α`` in ``R^n``.

Modules
-------
core            problem data and exact thresholds
classifier      existence / non-existence verdicts with citations
radial_calculus exact radial Laplacians, majorants, closed-form families
shooting        radial initial-value solver and profile checkers
certificates    exponent bookkeeping of the non-existence arguments
cli             command-line front end
"""
from .certificates import decay_certificate, moser_schedule, sublinear_absorption_check
from .classifier import (
    Citation,
    ExistenceVerdict,
    existence_table,
    exists_nonneg_nontrivial,
    exists_positive,
    nonneg_positivity_gap,
)
from .core import (
    INF,
    NEG_INF,
    ExtendedRational,
    ProblemSpec,
    kns_converges,
    singular_threshold,
    sobolev_exponent,
)
from .profile import OutcomeKind, RadialProfile, ShootOutcome
from .radial_calculus import (
    RadialPolynomial,
    bubble_family,
    eigen_ratio,
    pizzetti_coeff,
    pizzetti_majorant,
    power_family,
    residual,
    supersolution_poly,
)
from .shooting import (
    ShootOptions,
    compare_check,
    growth_series,
    pizzetti_check,
    shoot_search,
    sign_cascade_check,
    solve_ivp,
)

__version__ = "0.1.0"
