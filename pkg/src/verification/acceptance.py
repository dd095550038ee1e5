"""Full-scale acceptance checks run by ``fbmvar verify``."""

import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO

import numpy as np
import structlog

from src.config import Config, load_config
from src.limitlaws import (
    NORMAL_TAIL,
    fit_rate_slope,
    exponent_continuity_gaps,
    kolmogorov_rates,
    ks_two_sample,
    reference_sample,
    sample_hermite_limit_batch,
)
from src.sampling import RandomStream, fgn_autocovariances, sample_fgn_batch
from src.series import (
    SeriesKind,
    SeriesTag,
    estimate_series,
    euler_maclaurin_check,
    limit_series,
    normal_series_exact,
    normalized_ratio,
    predicted_limit,
)
from src.variations import (
    exact_second_moment,
    exact_second_moment_bruteforce,
    growth_exponent,
    hermite_eval,
    normalization_constants,
    variation_draws,
)

logger = structlog.get_logger(__name__)


@dataclass
class CriterionResult:
    name: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0


def _within(estimate: float, target: float, stderr: float, k: float = 4.0) -> bool:
    return abs(estimate - target) <= k * stderr


def check_hermite_algebra(config: Config) -> Dict[str, Any]:
    x = np.linspace(-6.0, 6.0, 241)
    closed = {
        0: np.ones_like(x),
        1: x,
        2: x ** 2 - 1,
        3: x ** 3 - 3 * x,
        4: x ** 4 - 6 * x ** 2 + 3,
    }
    worst = max(
        float(np.max(np.abs(hermite_eval(q, x) - p) / np.maximum(1.0, np.abs(p))))
        for q, p in closed.items()
    )
    parity = all(np.array_equal(hermite_eval(q, -x), (-1) ** q * hermite_eval(q, x)) for q in range(9))
    return {"passed": worst <= 1e-12 and parity, "max_relative_error": worst, "parity_exact": parity}


def check_generator_fidelity(config: Config) -> Dict[str, Any]:
    n, replicas, lags = 512, 200, 6
    details: Dict[str, Any] = {"passed": True}
    for j, hurst in enumerate((0.3, 0.5, 0.7, 0.9)):
        streams = RandomStream(config.series.seed).child(2, j).spawn_many(range(replicas))
        x = sample_fgn_batch(n, hurst, streams, config.sampling)
        per_path = np.stack([np.mean(x[:, : n - k] * x[:, k:], axis=1) for k in range(lags)], axis=1)
        mean = per_path.mean(axis=0)
        stderr = per_path.std(axis=0, ddof=1) / math.sqrt(replicas)
        target = fgn_autocovariances(hurst, lags - 1)
        ok = bool(np.all(np.abs(mean - target) <= 4.0 * stderr))
        details[f"H={hurst}"] = {"max_z": float(np.max(np.abs(mean - target) / stderr)), "ok": ok}
        details["passed"] &= ok
    return details


def check_variance_oracle(config: Config, replicas: int = 4000) -> Dict[str, Any]:
    details: Dict[str, Any] = {"passed": True}
    for q in (2, 3):
        for hurst in (0.3, 0.5, 0.7, 0.9):
            v = variation_draws(q, hurst, [256, 1024], replicas, config.series.seed, path=(3, q),
                                config=config.sampling)
            for i, n in enumerate((256, 1024)):
                squares = v[:, i] ** 2
                estimate = float(squares.mean())
                stderr = float(squares.std(ddof=1) / math.sqrt(replicas))
                target = exact_second_moment(q, hurst, n)
                ok = _within(estimate, target, stderr)
                details[f"q={q},H={hurst},n={n}"] = {"z": (estimate - target) / stderr, "ok": ok}
                details["passed"] &= ok
    folded = exact_second_moment(2, 0.7, 512)
    brute = exact_second_moment_bruteforce(2, 0.7, 512)
    details["folded_vs_bruteforce"] = abs(folded - brute) / brute
    details["passed"] &= details["folded_vs_bruteforce"] <= 1e-10
    return details


def check_clt_regime(config: Config) -> Dict[str, Any]:
    q, hurst = 2, 0.5
    grid = config.rates.n_grid
    points = kolmogorov_rates(q, hurst, grid, config.rates.replicas, config.series.seed, config=config)
    ks = {p.n: p.ks for p in points}
    slope_points = kolmogorov_rates(q, hurst, grid, config.rates.slope_replicas, config.series.seed + 1,
                                    config=config)
    fit = fit_rate_slope({p.n: p.ks for p in slope_points})
    largest, smallest = max(grid), min(grid)
    passed = ks[largest] < 0.05 and ks[largest] < ks[smallest] and -0.7 <= fit.slope <= -0.3
    return {"passed": passed, "ks": ks, "slope": fit.slope, "slope_stderr": fit.stderr}


def check_hermite_regime(config: Config, n: int = 2 ** 10, m: int = 3000) -> Dict[str, Any]:
    q, hurst = 2, 0.9
    reference = reference_sample(q, hurst, config)
    draws = sample_hermite_limit_batch(q, hurst, n, m, config.series.seed + 5, config=config)
    ks = ks_two_sample(draws.values, reference)

    consts = normalization_constants(q, hurst, config.constants)
    target = exact_second_moment(q, hurst, n) / (consts.c2 ** 2 * float(n) ** (2 * growth_exponent(q, hurst)))
    squares = draws.values ** 2
    variance = float(np.var(draws.values, ddof=1))
    stderr = float(np.std(squares, ddof=1) / math.sqrt(m))
    passed = ks < 0.08 and _within(variance, target, stderr)
    return {"passed": passed, "two_sample_ks": ks, "variance": variance, "target": target, "stderr": stderr}


def check_hsu_robbins_normal(config: Config) -> Dict[str, Any]:
    at_01 = 0.1 ** 2 * normal_series_exact(SeriesTag.G1, 1.0, 0.1)
    at_001 = 0.01 ** 2 * normal_series_exact(SeriesTag.G1, 1.0, 0.01)
    passed = abs(at_01 - 0.995) <= 0.005 and abs(at_001 - 1.0) <= 1e-3
    return {"passed": passed, "eps=0.1": at_01, "eps=0.01": at_001}


def check_spitzer_normal(config: Config) -> Dict[str, Any]:
    grid = [10.0 ** -k for k in range(3, 9)]
    ratios = [normal_series_exact(SeriesTag.F1, 1.0, eps) / -math.log(eps) for eps in grid]
    at_1e6 = ratios[grid.index(1e-6)]
    increasing = all(b > a for a, b in zip(ratios, ratios[1:])) and ratios[-1] < 2.0

    em_grid = np.geomspace(0.5, 1e-4, 10)
    residuals = [euler_maclaurin_check(NORMAL_TAIL, 1.0, float(eps)).residual for eps in em_grid]
    em_ok = max(abs(r) for r in residuals) <= 1e-8
    passed = abs(at_1e6 - 1.9498) <= 0.002 and increasing and em_ok
    return {"passed": passed, "ratio_at_1e-6": at_1e6, "ratios": ratios, "em_max_residual": max(map(abs, residuals))}


def g2_bracket(config: Config, tol: float = 0.02) -> Dict[str, Any]:
    """
    G2 at q = 2, H = 0.9, eps = 0.5 c2 against the limit-law series at the same eps.

    At this eps the discrete sum still differs from E|Z|^{1/a} by about
    -(eps/c2)^{1/a}/2, so the target is the series with V_n replaced by the
    reference sample rather than the eps -> 0 moment.
    """
    g2 = SeriesKind(SeriesTag.G2, 2, 0.9)
    consts = normalization_constants(2, 0.9, config.constants)
    reference = reference_sample(2, 0.9, config)
    eps = 0.5 * consts.c2
    est = estimate_series(g2, eps, tol=tol, consts=consts, config=config)
    ratio = normalized_ratio(g2, eps, est.value, consts)
    target = normalized_ratio(g2, eps, limit_series(g2, eps, consts, reference), consts)
    return {
        "passed": abs(ratio / target - 1.0) <= 0.3,
        "g2_ratio": ratio,
        "g2_limit_series_ratio": target,
        "g2_reference_moment": predicted_limit(g2, reference).value,
    }


def check_headline_series(config: Config) -> Dict[str, Any]:
    details: Dict[str, Any] = {}
    g1 = SeriesKind(SeriesTag.G1, 2, 0.5)
    c1 = normalization_constants(2, 0.5, config.constants).c1
    est = estimate_series(g1, 0.3 * c1, tol=0.02, config=config)
    details["g1_ratio"] = normalized_ratio(g1, est.eps, est.value)

    f1 = SeriesKind(SeriesTag.F1, 2, 0.5)
    est = estimate_series(f1, 0.05 * c1, tol=0.02, config=config)
    details["f1_ratio"] = normalized_ratio(f1, est.eps, est.value)

    g2 = g2_bracket(config)
    details.update(g2)
    details["passed"] = (
        0.7 <= details["g1_ratio"] <= 1.3
        and 1.2 <= details["f1_ratio"] <= 2.8
        and g2["passed"]
    )
    return details


def check_rate_table(config: Config) -> Dict[str, Any]:
    gaps = {q: exponent_continuity_gaps(q) for q in range(2, 7)}
    worst = max(max(g.values()) for g in gaps.values())
    return {"passed": worst <= 1e-12, "max_gap": worst}


def check_determinism(config: Config) -> Dict[str, Any]:
    from src.cli import series_table

    kind = SeriesKind(SeriesTag.G1, 2, 0.5)
    eps_grid = [2.0, 1.5]
    outputs = []
    for workers in (1, 1, 8):
        run_config = replace(config, sampling=replace(config.sampling, workers=workers))
        csv_text, _ = series_table(kind, eps_grid, tol=0.05, budget=200_000, seed=7, config=run_config)
        outputs.append(csv_text)
    identical = len(set(outputs)) == 1
    return {"passed": identical, "rows": outputs[0].count("\n") - 1}


CRITERIA: Dict[int, "tuple[str, Callable[[Config], Dict[str, Any]]]"] = {
    1: ("Hermite algebra", check_hermite_algebra),
    2: ("Generator fidelity", check_generator_fidelity),
    3: ("Variance oracle", check_variance_oracle),
    4: ("CLT regime", check_clt_regime),
    5: ("Hermite regime", check_hermite_regime),
    6: ("Hsu-Robbins normal case", check_hsu_robbins_normal),
    7: ("Spitzer normal case", check_spitzer_normal),
    8: ("Spitzer/Hsu-Robbins for variations", check_headline_series),
    9: ("Rate-table structure", check_rate_table),
    10: ("Determinism", check_determinism),
}


def run_criterion(number: int, config: Config) -> CriterionResult:
    name, check = CRITERIA[number]
    started = time.perf_counter()
    try:
        details = check(config)
    except Exception as e:
        logger.error("acceptance_criterion_error", criterion=number, error=str(e))
        details = {"passed": False, "error": f"{type(e).__name__}: {e}"}
    elapsed = time.perf_counter() - started
    passed = bool(details.pop("passed"))
    logger.info("acceptance_criterion", criterion=number, name=name, passed=passed, seconds=round(elapsed, 2))
    return CriterionResult(name=name, passed=passed, details=details, seconds=elapsed)


def run_acceptance(config: Optional[Config] = None, only: Optional[Sequence[int]] = None,
                   out: Optional[TextIO] = None) -> List[CriterionResult]:
    """Run the selected criteria and print a results table."""
    config = config or load_config()
    numbers = sorted(only) if only else sorted(CRITERIA)
    results = [run_criterion(k, config) for k in numbers]

    if out is not None:
        print("=" * 60, file=out)
        print("Acceptance Results", file=out)
        print("=" * 60, file=out)
        for k, result in zip(numbers, results):
            status = "✅" if result.passed else "❌"
            print(f"   {status} {k:>2}. {result.name} ({result.seconds:.1f}s)", file=out)
        print("", file=out)
        print("All criteria passed." if all(r.passed for r in results) else "Some criteria failed.", file=out)
    return results
