"""Rearrangement-invariant norms, weight transforms and Fourier inequality checks."""

__version__ = "0.1.0"

from .conditions import (CheckReport, IndexEstimate, check_dilation_integral,
                         check_fundamental_suffix_sup, check_gamma_eq_lambda,
                         check_gamma_fourier_conditions, check_interp_L2, dilation_norm_h,
                         estimate_indices, fundamental_weight)
from .fourier import (FourierReport, RadialStep, RearrangedTransform, radial_rearrange,
                      random_family, rearrange_transform, reverse_constant, transform,
                      verify_jt, verify_norm_pair, verify_reverse)
from .funcore import (EvalFn, QuadratureError, QuadSpec, StepFn, distribution, double_star,
                      hardy_average, hardy_tail, integrate, rearrange, reciprocal_primitive)
from .norms import (Convexified, Gamma, KInterpolation, Lambda, LargestDomain, Lebesgue,
                    Orlicz, convexify, fundamental_function, norm)
from .orlicz import NFunction, PowerN, SampledN, complementary
from .weights import (Weight, admissible, down_dual_weight, fourier_range_weight,
                      gamma_lambda_counterexample, level_weight, reflect_weight)

__all__ = [
    "__version__", "CheckReport", "IndexEstimate", "check_dilation_integral",
    "check_fundamental_suffix_sup", "check_gamma_eq_lambda", "check_gamma_fourier_conditions",
    "check_interp_L2", "dilation_norm_h", "estimate_indices", "fundamental_weight",
    "FourierReport", "RadialStep", "RearrangedTransform", "radial_rearrange", "random_family",
    "rearrange_transform", "reverse_constant", "transform", "verify_jt", "verify_norm_pair",
    "verify_reverse", "EvalFn", "QuadratureError", "QuadSpec", "StepFn", "distribution",
    "double_star", "hardy_average", "hardy_tail", "integrate", "rearrange",
    "reciprocal_primitive", "Convexified", "Gamma", "KInterpolation", "Lambda", "LargestDomain",
    "Lebesgue", "Orlicz", "convexify", "fundamental_function", "norm", "NFunction", "PowerN",
    "SampledN", "complementary", "Weight", "admissible", "down_dual_weight",
    "fourier_range_weight", "gamma_lambda_counterexample", "level_weight", "reflect_weight",
]
