"""Exact minimal signed harmonic sums, minimal gaps, cosine-product
kernels, the limiting density, and Monte Carlo comparison tools."""

from .errors import (
    CapExceeded,
    DivergedTruncation,
    HarmsumError,
    InvalidSpec,
    Overflow,
    RangeUnreachable,
    ResourceLimit,
    TruncationFailure,
)
from .exact import (
    DecayProfile,
    GapResult,
    SearchResult,
    SignVector,
    TritVector,
    TwoStageResult,
    decay_profile,
    enumerate_sums,
    evaluate_signs,
    min_gap,
    min_signed_sum,
    parse_exact,
    two_stage_approx,
    two_stage_for_n,
)
from .sequences import (
    GrowthEnvelope,
    SequenceSpec,
    SequenceTerms,
    count_up_to,
    generate,
    growth_envelope,
    is_prime,
    terms_array,
)
from .analytic import (
    BoundCheckReport,
    DensitySample,
    RhoValue,
    check_decay,
    check_exponential_bound,
    cosine_product,
    cosine_product_limit,
    count_far_from_integer,
    count_near_multiples,
    density,
    expectation_identity,
    exponential_bound_suite,
    interval_probability,
    sandwich_suite,
    sigma_minus,
    smooth_bump,
    smooth_bump_transform,
)
from .montecarlo import (
    HistogramRow,
    SimulationConfig,
    SimulationReport,
    exhaustive_probability,
    histogram,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "BoundCheckReport",
    "CapExceeded",
    "DecayProfile",
    "DensitySample",
    "DivergedTruncation",
    "GapResult",
    "GrowthEnvelope",
    "HarmsumError",
    "HistogramRow",
    "InvalidSpec",
    "Overflow",
    "RangeUnreachable",
    "ResourceLimit",
    "RhoValue",
    "SearchResult",
    "SequenceSpec",
    "SequenceTerms",
    "SignVector",
    "SimulationConfig",
    "SimulationReport",
    "TritVector",
    "TruncationFailure",
    "TwoStageResult",
    "check_decay",
    "check_exponential_bound",
    "cosine_product",
    "cosine_product_limit",
    "count_far_from_integer",
    "count_near_multiples",
    "count_up_to",
    "decay_profile",
    "density",
    "enumerate_sums",
    "evaluate_signs",
    "exhaustive_probability",
    "expectation_identity",
    "exponential_bound_suite",
    "generate",
    "growth_envelope",
    "histogram",
    "interval_probability",
    "is_prime",
    "min_gap",
    "min_signed_sum",
    "parse_exact",
    "sandwich_suite",
    "sigma_minus",
    "simulate",
    "smooth_bump",
    "smooth_bump_transform",
    "terms_array",
    "two_stage_approx",
    "two_stage_for_n",
]
