"""Numerical certification of operator Young, Ando and Hoelder-McCarthy
type inequalities and their refinements.

Submodules
----------
scalar_young
    Scalar weight constants, refinement schedules and two-sided bounds.
matspd
    Positive-definite matrices, weighted means and Loewner certification.
refinements
    Operator Young refinements and reverses.
posmaps
    Positive linear maps, Ando's inequality and its reverses.
hm
    Quadratic-form (Hoelder-McCarthy type) inequalities.
apps
    Hoelder-type difference reverses, Tsallis entropy, regularized means.
harness, cli
    Seeded batch verification and its command line front end.
"""
from __future__ import annotations

from .errors import DomainError, IllConditionedError
from .matspd import (
    Certified,
    Chain,
    GeodesicPath,
    SlackReport,
    arithmetic_mean,
    frac_power,
    geometric_mean,
    harmonic_mean,
    loewner_geq,
    random_hpd,
    random_unit_vector,
)
from .scalar_young import (
    refinement_schedule,
    scalar_SN,
    scalar_sababheh_bounds,
    scalar_zhao_bounds,
    weight_constants,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "IllConditionedError",
    "Certified",
    "Chain",
    "GeodesicPath",
    "SlackReport",
    "arithmetic_mean",
    "frac_power",
    "geometric_mean",
    "harmonic_mean",
    "loewner_geq",
    "random_hpd",
    "random_unit_vector",
    "refinement_schedule",
    "scalar_SN",
    "scalar_sababheh_bounds",
    "scalar_zhao_bounds",
    "weight_constants",
]
