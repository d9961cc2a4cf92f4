"""Step functions, rearrangements, averaging operators and quadrature."""

from .evalfn import (Envelope, EvalFn, cumulative_from_zero, cumulative_to_infinity,
                     fit_envelope, integrate_evalfn)
from .operators import double_star, hardy_average, hardy_tail, integrate, reciprocal_primitive
from .quadrature import QuadratureError, QuadSpec, gk_segments, log_segments
from .stepfn import StepFn, distribution, rearrange

__all__ = [
    "Envelope", "EvalFn", "QuadSpec", "QuadratureError", "StepFn",
    "cumulative_from_zero", "cumulative_to_infinity", "distribution", "double_star",
    "fit_envelope", "gk_segments", "hardy_average", "hardy_tail", "integrate",
    "integrate_evalfn", "log_segments", "rearrange", "reciprocal_primitive",
]
