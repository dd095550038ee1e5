import math

import pytest

from src.errors import BudgetExceeded, FbmVarError
from src.sampling import RandomStream
from src.series import (
    SeriesKind,
    SeriesTag,
    estimate_series,
    replica_schedule,
    tail_prob_mc,
)
from src.variations import exact_second_moment


def test_schedule_respects_budget_and_floor(config):
    kind = SeriesKind(SeriesTag.F1, 2, 0.5)
    bands = replica_schedule(kind, 100, 100_000, config)
    assert sum(b.pairs for b in bands) <= 100_000
    assert all(b.replicas >= config.series.min_replicas for b in bands)
    assert [b.replicas for b in bands] == sorted((b.replicas for b in bands), reverse=True)
    assert bands[0].lo == 1 and bands[-1].hi == 100


def test_schedule_is_flat_for_unit_weights(config):
    bands = replica_schedule(SeriesKind(SeriesTag.G1, 2, 0.5), 64, 64_000, config)
    assert len({b.replicas for b in bands}) == 1


def test_schedule_caps_replicas(config):
    config.series.max_replicas_per_n = 500
    bands = replica_schedule(SeriesKind(SeriesTag.G1, 2, 0.5), 8, 10 ** 9, config)
    assert all(b.replicas == 500 for b in bands)


def test_schedule_rejects_small_budget(config):
    with pytest.raises(BudgetExceeded) as info:
        replica_schedule(SeriesKind(SeriesTag.G1, 2, 0.5), 1000, 1000, config)
    assert info.value.replicas_needed == 1000 * config.series.min_replicas
    assert info.value.to_dict()["error"] == "BudgetExceeded"


def test_tail_probability_at_zero_threshold(config):
    est = tail_prob_mc(2, 0.5, 32, 0.0, 200, RandomStream(1), config)
    assert est.p_hat == 1.0
    assert est.ci[0] <= 1.0 <= est.ci[1] + 1e-12


def test_tail_probability_chebyshev(config):
    threshold = 10 * math.sqrt(exact_second_moment(2, 0.7, 64))
    est = tail_prob_mc(2, 0.7, 64, threshold, 1000, RandomStream(2), config)
    assert est.p_hat <= 0.01


def test_tail_probability_needs_replicas(config):
    with pytest.raises(FbmVarError):
        tail_prob_mc(2, 0.5, 32, 1.0, 50, RandomStream(1), config)


def test_huge_epsilon_gives_zero(config):
    est = estimate_series(SeriesKind(SeriesTag.G1, 2, 0.5), 1e3, tol=0.02, config=config)
    assert est.value == 0.0
    assert est.n_trunc == 1
    assert est.remainder_bound <= 0.02


def test_estimate_is_identical_for_any_worker_count(config):
    kind = SeriesKind(SeriesTag.G1, 2, 0.5)
    results = []
    for workers in (1, 2):
        config.sampling.workers = workers
        est = estimate_series(kind, 2.0, tol=0.05, rng=RandomStream(7), budget=50_000, config=config)
        results.append((est.value, est.mc_stderr, est.n_trunc))
    assert results[0] == results[1]


def test_estimate_reports_schedule(config):
    est = estimate_series(SeriesKind(SeriesTag.F1, 2, 0.5), 2.0, tol=0.05, rng=RandomStream(3),
                          budget=50_000, config=config)
    assert est.total_pairs <= 50_000
    assert est.schedule()[0]["lo"] == 1
    assert est.schedule()[-1]["hi"] == est.n_trunc
    assert est.value >= 0.0 and est.mc_stderr >= 0.0


def test_epsilon_beyond_truncation_cap(config):
    config.series.max_n_trunc = 100
    with pytest.raises(BudgetExceeded):
        estimate_series(SeriesKind(SeriesTag.G1, 2, 0.5), 0.05, tol=0.02, config=config)


@pytest.mark.slow
def test_estimate_agrees_across_seeds(config):
    kind = SeriesKind(SeriesTag.G1, 2, 0.5)
    a = estimate_series(kind, 1.5, tol=0.02, rng=RandomStream(11), budget=400_000, config=config)
    b = estimate_series(kind, 1.5, tol=0.02, rng=RandomStream(12), budget=4_000_000, config=config)
    assert abs(a.value - b.value) <= 4 * math.hypot(a.mc_stderr, b.mc_stderr)


def test_first_term_tail_probability(config):
    # n = 1: P(|X^2 - 1| > 3) = P(|X| > 2)
    replicas = 20_000
    est = tail_prob_mc(2, 0.5, 1, 3.0, replicas, RandomStream(5), config)
    target = math.erfc(2 / math.sqrt(2))
    assert abs(est.p_hat - target) <= 4 * math.sqrt(target * (1 - target) / replicas)
    assert est.ci[0] < est.p_hat < est.ci[1]


@pytest.mark.slow
def test_estimate_grows_as_epsilon_shrinks(config):
    kind = SeriesKind(SeriesTag.G1, 2, 0.5)
    values = [
        estimate_series(kind, eps, tol=0.05, rng=RandomStream(13), budget=2_000_000, config=config).value
        for eps in (3.0, 2.5, 2.0)
    ]
    assert values[0] < values[1] < values[2]
