"""Tail functionals, Hermite-limit sampling and convergence rates."""
from .tails import (
    NORMAL_TAIL,
    EmpiricalSample,
    TailTag,
    TwoSidedTail,
    empirical_tail,
    ks_distance,
    ks_stderr,
    ks_two_sample,
    normal_absolute_moment,
    phi_normal,
    phi_normal_derivative,
    wilson_interval,
)
from .hermite_limit import (
    HermiteLimitDraws,
    limit_scaling,
    reference_sample,
    sample_hermite_limit,
    sample_hermite_limit_batch,
    sample_moments,
    surrogate_error_exponent,
)
from .rates import (
    RateBound,
    RatePoint,
    SlopeFit,
    exponent_continuity_gaps,
    fit_rate_slope,
    kolmogorov_rates,
    normalized_variation_draws,
    rate_breakpoints,
    rate_exponent,
)
