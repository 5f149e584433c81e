"""Projection-predicate runtime assertions for quantum while-programs."""

from .projections import (
    Projection,
    complement,
    embed,
    from_kets,
    join,
    local_projection,
    meet,
    satisfies,
    support,
    violation,
)
from .states import DensityOperator, StateVector, fidelity, trace_distance
from .lang.parser import parse_program
from .lang.interp import run_trajectory
from .lang.exact import semantic_function
from .lower import lower_assertion, lower_projection, count_resources
from .stats import (
    beta_quantile,
    cp_zero_interval,
    gentle_bounds,
    theorem1_intervals,
    theorem2_report,
)

__all__ = [
    "Projection",
    "DensityOperator",
    "StateVector",
    "parse_program",
    "run_trajectory",
    "semantic_function",
    "lower_assertion",
    "lower_projection",
    "count_resources",
    "from_kets",
    "meet",
    "join",
    "complement",
    "embed",
    "support",
    "local_projection",
    "satisfies",
    "violation",
    "fidelity",
    "trace_distance",
    "cp_zero_interval",
    "beta_quantile",
    "theorem1_intervals",
    "theorem2_report",
    "gentle_bounds",
]

__version__ = "0.1.0"
