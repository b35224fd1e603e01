"""Exact finite-sample large-deviation computations on finite alphabets.

The probability that the empirical distribution of an i.i.d. sample falls in
a polyhedral set of distributions is computed exactly by summing over type
classes, together with the conditional marginal, its total correlation, the
I-projection and the bounds relating them.
"""

__version__ = "0.1.0"

from .bounds import (BoundsReport, SubsetBound, SweepEntry, full_report, max_cross_entropy,
                     subset_report, sweep)
from .conditional import ConditionalSummary, core_identity_check, kl_to_product, summarize
from .constraints import (ConstraintSet, LinearConstraint, Relation, contains, contains_type, eq,
                          ge, is_subset_witness, le)
from .errors import (CapacityError, ConvergenceError, DimensionError, EmptyEventError,
                     InfeasibleError, InfiniteDivergenceError, PreconditionError, SanovError,
                     ValidationError)
from .iprojection import IProjection, dual_value_and_gradient, project, pythagorean_residual
from .measures import Dist, InfoValue, Residual, cross_entropy, entropy, relative_entropy
from .montecarlo import McEstimate, estimate, wilson_interval
from .typespace import (TypeVector, brute_force_conditional, brute_force_event_prob,
                        enumerate_types, log_type_prob, simplex_grid)
from .verify import Check, verify_suite

__all__ = [
    "BoundsReport",
    "brute_force_conditional",
    "brute_force_event_prob",
    "CapacityError",
    "Check",
    "ConditionalSummary",
    "ConstraintSet",
    "contains",
    "contains_type",
    "ConvergenceError",
    "core_identity_check",
    "cross_entropy",
    "DimensionError",
    "Dist",
    "dual_value_and_gradient",
    "EmptyEventError",
    "entropy",
    "enumerate_types",
    "eq",
    "estimate",
    "full_report",
    "ge",
    "InfeasibleError",
    "InfiniteDivergenceError",
    "InfoValue",
    "IProjection",
    "is_subset_witness",
    "kl_to_product",
    "le",
    "LinearConstraint",
    "log_type_prob",
    "max_cross_entropy",
    "McEstimate",
    "PreconditionError",
    "project",
    "pythagorean_residual",
    "Relation",
    "relative_entropy",
    "Residual",
    "SanovError",
    "simplex_grid",
    "subset_report",
    "SubsetBound",
    "summarize",
    "sweep",
    "SweepEntry",
    "TypeVector",
    "ValidationError",
    "verify_suite",
    "wilson_interval",
]
