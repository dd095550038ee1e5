"""Hermite polynomials, variation statistics and normalization constants."""
from .hermite import hermite_eval, hermite_mehler_cov, validate_order
from .statistic import (
    Regime,
    RegimeTag,
    VariationStatistic,
    compensated_cumsum,
    compute_vn,
    critical_hurst,
    growth_exponent,
    normalize,
    variation_prefixes,
)
from .moments import (
    NormalizationConstants,
    c1_constant,
    c2_closed_form,
    c2_constant,
    exact_second_moment,
    exact_second_moment_bruteforce,
    normalization_constants,
    second_moment_majorant,
)
from .draws import VariationTask, replica_streams, variation_block, variation_draws
