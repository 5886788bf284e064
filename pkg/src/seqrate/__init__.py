"""Sequential source-coding rate schedules under cumulative leakage constraints.

Decide whether a cumulative rate schedule (CRDF) is achievable for a given
leakage budget (CLDF), compute the least attainable average distortion,
and emit concrete causal transmission plans realizing the optimum.
"""

from .achieve import (Verdict, check_linear_rd, check_lossless, check_lossy,
                      hamming_consistency, min_distortion)
from .cumfn import (CumulativeFunction, Knot, StepFunction, ValidationReport,
                    clip_shift, effective_crdf, leakage_offset, same_function,
                    sample_grid, validate_regular)
from .envelope import (ConcaveEnvelope, concave_envelope, legendre_value,
                       segment_slopes)
from .oracle import (BruteForceResult, brute_force_min_distortion,
                     majorization_property_check)
from .ratedist import (ConvergenceError, DistortionSpec, RDCurve, SourceModel,
                       binary_entropy, blahut_arimoto_point, build_rd_curve,
                       closed_form_curve, d_max, distortion_at_rate, entropy)
from .schedule import (RateProfile, RateSplitMatrix, TransmissionPlan,
                       majorizes, rate_profile, split_rates, transmission_plan)

__all__ = [
    "BruteForceResult", "ConcaveEnvelope", "ConvergenceError",
    "CumulativeFunction", "DistortionSpec", "Knot", "RDCurve", "RateProfile",
    "RateSplitMatrix", "SourceModel", "StepFunction", "TransmissionPlan",
    "ValidationReport", "Verdict", "binary_entropy", "blahut_arimoto_point",
    "brute_force_min_distortion", "build_rd_curve", "check_linear_rd",
    "check_lossless", "check_lossy", "clip_shift", "closed_form_curve",
    "concave_envelope", "d_max", "distortion_at_rate", "effective_crdf",
    "entropy", "hamming_consistency", "leakage_offset",
    "legendre_value", "majorization_property_check", "majorizes",
    "min_distortion", "rate_profile", "same_function", "sample_grid",
    "segment_slopes", "split_rates", "transmission_plan", "validate_regular",
]

__version__ = "0.1.0"
