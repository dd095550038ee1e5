"""Spitzer and Hsu-Robbins series for Hermite variations."""
from .kinds import EpsilonGrid, SeriesKind, SeriesTag, bands_for, default_epsilon_grid
from .truncation import (
    TruncationBound,
    choose_n_trunc,
    exponential_tail_diagnostic,
    truncation_bound,
    truncation_bound_detail,
)
from .deterministic import (
    EulerMaclaurinDecomposition,
    FirstChaosLimits,
    euler_maclaurin_check,
    limit_series_from_sample,
    normal_power_integral,
    normal_power_series,
    normal_series_exact,
    q1_special,
)
from .monte_carlo import (
    ReplicaBand,
    SeriesEstimate,
    TailProbability,
    estimate_series,
    replica_schedule,
    tail_prob_mc,
)
from .limits import LimitPrediction, limit_series, normalized_ratio, predicted_limit
