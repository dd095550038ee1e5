"""Command-line front end: simulate, constants, rates, series, verify and report."""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import structlog
from dotenv import dotenv_values

from src.config import Config, load_config
from src.errors import BudgetExceeded, ConfigError, DegenerateFit, FbmVarError, RegimeError
from src.limitlaws import EmpiricalSample, fit_rate_slope, kolmogorov_rates, reference_sample
from src.sampling import PathSpec, RandomStream, fbm_path, sample_fgn, validate_hurst
from src.sampling.fgn import normals_per_path
from src.sampling.random_stream import GENERATOR_NAME
from src.series import (
    EpsilonGrid,
    SeriesKind,
    default_epsilon_grid,
    estimate_series,
    exponential_tail_diagnostic,
    limit_series,
    normalized_ratio,
    predicted_limit,
)
from src.storage.reports import (
    PATH_COLUMNS,
    RATE_COLUMNS,
    SERIES_COLUMNS,
    csv_text,
    json_text,
    merge_series_runs,
    provenance,
    sidecar_path,
    write_text,
)
from src.variations import (
    NormalizationConstants,
    Regime,
    exact_second_moment,
    normalization_constants,
    validate_order,
)
from src.verification import run_acceptance

logger = structlog.get_logger(__name__)

LOG_LEVELS = ("debug", "info", "warning", "error")


@dataclass
class RunConfig:
    """Parsed command line, after config-file defaults have been applied."""
    command: str
    q: Optional[int] = None
    hurst: Optional[float] = None
    n: Optional[int] = None
    n_grid: Optional[str] = None
    eps_grid: Optional[str] = None
    kind: Optional[str] = None
    tol: Optional[float] = None
    budget: Optional[int] = None
    seed: Optional[int] = None
    workers: Optional[int] = None
    replicas: Optional[int] = None
    output: Optional[Path] = None
    manifest: Optional[Path] = None
    cache_dir: Optional[str] = None
    inputs: List[Path] = field(default_factory=list)
    only: Optional[str] = None
    log_level: str = "info"


def configure_logging(level: str = "info") -> None:
    """JSON log lines on standard error; standard output is reserved for tables."""
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.JSONRenderer(),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(getattr(logging, level.upper())),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
    )


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="plain-text key=value file; flags win over its values")
    common.add_argument("--log-level", choices=LOG_LEVELS, default="info")
    common.add_argument("--seed", type=int, help="master seed (default: FBMVAR_SEED)")
    common.add_argument("--workers", type=int, help="worker processes (default: FBMVAR_WORKERS)")
    common.add_argument("--cache-dir", help="reference-sample cache (default: FBMVAR_CACHE_DIR)")
    common.add_argument("--output", type=Path, help="table destination (default: standard output)")
    common.add_argument("--manifest", type=Path, help="JSON manifest (default: next to --output)")
    return common


def build_parser() -> Tuple[argparse.ArgumentParser, Dict[str, argparse.ArgumentParser]]:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="fbmvar",
        description="Hermite variations of fractional Brownian motion: limit laws and Spitzer/Hsu-Robbins series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {}

    simulate = sub.add_parser("simulate", parents=[common], help="dump one exact fBm path")
    simulate.add_argument("--hurst", type=float)
    simulate.add_argument("--n", type=int)
    commands["simulate"] = simulate

    constants = sub.add_parser("constants", parents=[common], help="normalization constant c1 or c2")
    constants.add_argument("--q", type=int)
    constants.add_argument("--hurst", type=float)
    commands["constants"] = constants

    rates = sub.add_parser("rates", parents=[common], help="Kolmogorov distance to the limit law on an n-grid")
    rates.add_argument("--q", type=int)
    rates.add_argument("--hurst", type=float)
    rates.add_argument("--n-grid", help="comma-separated path lengths")
    rates.add_argument("--replicas", type=int)
    commands["rates"] = rates

    series = sub.add_parser("series", parents=[common], help="Spitzer/Hsu-Robbins series over an epsilon grid")
    series.add_argument("--kind", help="f1, f2, g1 or g2")
    series.add_argument("--q", type=int)
    series.add_argument("--hurst", type=float)
    series.add_argument("--eps-grid", help="comma-separated values or start:ratio:points")
    series.add_argument("--tol", type=float)
    series.add_argument("--budget", type=int)
    commands["series"] = series

    verify = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    verify.add_argument("--only", help="comma-separated criterion numbers")
    commands["verify"] = verify

    report = sub.add_parser("report", parents=[common], help="merge series runs into a summary table")
    report.add_argument("inputs", nargs="*", type=Path)
    commands["report"] = report

    return parser, commands


def read_config_file(path: Path) -> Dict[str, str]:
    """key=value pairs with keys normalized to argument names (``eps-grid`` -> ``eps_grid``)."""
    if not Path(path).is_file():
        raise ConfigError(f"config file not found: {path}", flag="--config")
    values = dotenv_values(path)
    return {key.strip().lower().replace("-", "_"): value for key, value in values.items() if value is not None}


def _apply_file_defaults(commands: Mapping[str, argparse.ArgumentParser], command: str,
                         values: Mapping[str, str]) -> None:
    known = {a.dest for p in commands.values() for a in p._actions}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}", flag="--config")
    own = {a.dest for a in commands[command]._actions}
    defaults = {k: v for k, v in values.items() if k in own and k not in ("config", "help", "inputs")}
    commands[command].set_defaults(**defaults)


def parse_run_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, commands = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        # Reparse with the file values as defaults so explicit flags still win.
        parser, commands = build_parser()
        _apply_file_defaults(commands, args.command, read_config_file(args.config))
        args = parser.parse_args(argv)

    values = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    return RunConfig(**values)


def library_config(rc: RunConfig) -> Config:
    """Environment defaults overridden by the command line."""
    config = load_config()
    if rc.workers is not None:
        if rc.workers < 1:
            raise ConfigError(f"--workers must be >= 1, got {rc.workers}", flag="--workers")
        config.sampling.workers = rc.workers
    if rc.seed is not None:
        if rc.seed < 0:
            raise ConfigError(f"--seed must be non-negative, got {rc.seed}", flag="--seed")
        config.series.seed = rc.seed
    if rc.budget is not None:
        if rc.budget < 1:
            raise ConfigError(f"--budget must be positive, got {rc.budget}", flag="--budget")
        config.series.budget = rc.budget
    if rc.tol is not None:
        if rc.tol <= 0:
            raise ConfigError(f"--tol must be positive, got {rc.tol}", flag="--tol")
        config.series.tolerance = rc.tol
    if rc.replicas is not None:
        if rc.replicas < 2:
            raise ConfigError(f"--replicas must be at least 2, got {rc.replicas}", flag="--replicas")
        config.rates.replicas = rc.replicas
    if rc.cache_dir:
        config.reference.cache_dir = rc.cache_dir
    return config


def _required(value: Any, flag: str) -> Any:
    if value is None:
        raise ConfigError(f"{flag} is required", flag=flag)
    return value


def _hurst(rc: RunConfig) -> float:
    try:
        return validate_hurst(_required(rc.hurst, "--hurst"))
    except ConfigError:
        raise
    except FbmVarError as e:
        raise ConfigError(e.message, flag="--hurst")


def _order(rc: RunConfig) -> int:
    try:
        return validate_order(_required(rc.q, "--q"))
    except ConfigError:
        raise
    except FbmVarError as e:
        raise ConfigError(e.message, flag="--q")


def _int_list(text: str, flag: str) -> List[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse {text!r} as integers", flag=flag)
    if not values or any(v < 1 for v in values):
        raise ConfigError("values must be positive integers", flag=flag)
    return values


def _emit(rc: RunConfig, table: str, manifest: Optional[Dict[str, Any]] = None) -> None:
    """Table to --output (or stdout); manifest to --manifest or beside --output."""
    if rc.output is None:
        sys.stdout.write(table)
        sys.stdout.flush()
    else:
        write_text(rc.output, table)
    if manifest is None:
        return
    target = rc.manifest or (sidecar_path(rc.output) if rc.output is not None else None)
    if target is not None:
        write_text(target, json_text(manifest))


def _reference_for(kind_q: int, hurst: float, config: Config) -> Optional[EmpiricalSample]:
    if kind_q == 1 or Regime.of(kind_q, hurst).is_clt:
        return None
    return reference_sample(kind_q, hurst, config)


def simulate_command(rc: RunConfig, config: Config) -> int:
    hurst = _hurst(rc)
    n = _required(rc.n, "--n")
    if n < 1:
        raise ConfigError(f"--n must be a positive integer, got {n}", flag="--n")
    seed = config.series.seed

    sample = sample_fgn(PathSpec(n, hurst, seed), RandomStream(seed), config.sampling)
    path = fbm_path(sample)
    rows = ((k, k / n, path[k], sample.increments[k] if k < n else "") for k in range(n + 1))
    metadata = provenance(
        hurst=hurst, n=n, seed=seed, generator_name=GENERATOR_NAME,
        embedding_size=normals_per_path(n, hurst, config.sampling),
    )
    _emit(rc, csv_text(PATH_COLUMNS, rows), metadata)
    return 0


def constants_command(rc: RunConfig, config: Config) -> int:
    consts = normalization_constants(_order(rc), _hurst(rc), config.constants)
    payload = {**consts.to_dict(), "versions": provenance()}
    _emit(rc, json_text(payload))
    return 0


def rates_command(rc: RunConfig, config: Config) -> int:
    q, hurst = _order(rc), _hurst(rc)
    n_grid = _int_list(rc.n_grid, "--n-grid") if rc.n_grid else config.rates.n_grid
    seed = config.series.seed
    reference = _reference_for(q, hurst, config)

    points = kolmogorov_rates(q, hurst, n_grid, config.rates.replicas, seed, reference, config)
    manifest: Dict[str, Any] = {
        "q": q, "hurst": hurst, "seed": seed, "replicas": config.rates.replicas,
        "n_grid": [p.n for p in points], "predicted_exponent": points[0].predicted_exponent,
        "versions": provenance(),
    }
    try:
        fit = fit_rate_slope({p.n: p.ks for p in points})
        manifest.update(slope=fit.slope, slope_stderr=fit.stderr, intercept=fit.intercept)
        logger.info("rate_slope_fit", slope=fit.slope, stderr=fit.stderr, predicted=points[0].predicted_exponent)
    except DegenerateFit as e:
        logger.warning("rate_slope_unavailable", **e.to_dict())
        manifest.update(slope=None, slope_error=e.message)

    rows = ((p.n, p.ks, p.stderr, p.predicted_exponent) for p in points)
    _emit(rc, csv_text(RATE_COLUMNS, rows), manifest)
    return 0


def series_table(
    kind: SeriesKind,
    eps_grid: Sequence[float],
    tol: float,
    budget: int,
    seed: int,
    config: Config,
    reference: Optional[EmpiricalSample] = None,
    consts: Optional[NormalizationConstants] = None,
    skip_infeasible: bool = False,
) -> Tuple[str, Dict[str, Any]]:
    """
    The series CSV and its run manifest for one kind over an epsilon grid.

    Every epsilon reuses the streams of ``seed``. With ``skip_infeasible`` the
    grid stops at the first epsilon the budget cannot afford; otherwise
    BudgetExceeded propagates.
    """
    consts = consts or normalization_constants(kind.q, kind.hurst, config.constants)
    prediction = predicted_limit(kind, reference)
    rows, schedule, limit_parts, diagnostics, infeasible = [], {}, {}, {}, []

    for eps in eps_grid:
        try:
            est = estimate_series(kind, eps, tol, consts, RandomStream(seed), budget, config)
        except BudgetExceeded as e:
            if not skip_infeasible:
                raise
            logger.warning("series_epsilon_infeasible", eps=eps, **e.context)
            infeasible.append({"epsilon": eps, **e.context})
            break
        ratio = normalized_ratio(kind, eps, est.value, consts)
        rows.append((eps, est.value, est.mc_stderr, est.n_trunc, est.remainder_bound, ratio, prediction.value))

        key = repr(float(eps))
        schedule[key] = est.schedule()
        limit_parts[key] = limit_series(kind, eps, consts, reference)
        sigma = exact_second_moment(kind.q, kind.hurst, est.n_trunc) ** 0.5
        diagnostics[key] = {
            "moment_order": est.moment_order,
            "exponential_tail_at_n_trunc": exponential_tail_diagnostic(
                float(kind.threshold(eps, est.n_trunc)), sigma, kind.q),
        }

    manifest = {
        "kind": kind.tag.value, "q": kind.q, "hurst": kind.hurst, "seed": seed, "budget": budget, "tol": tol,
        "eps_grid": [float(e) for e in eps_grid], "schedule": schedule, "limit_parts": limit_parts,
        "predicted_limit": prediction.value, "predicted_limit_stderr": prediction.stderr,
        "diagnostics": diagnostics, "infeasible": infeasible, "versions": provenance(),
    }
    return csv_text(SERIES_COLUMNS, rows), manifest


def series_command(rc: RunConfig, config: Config) -> int:
    q, hurst = _order(rc), _hurst(rc)
    kind = SeriesKind.parse(_required(rc.kind, "--kind"), q, hurst)
    explicit = rc.eps_grid is not None
    grid = EpsilonGrid.parse(rc.eps_grid) if explicit else default_epsilon_grid(kind, config.series)

    table, manifest = series_table(
        kind, list(grid), config.series.tolerance, config.series.budget, config.series.seed, config,
        reference=_reference_for(q, hurst, config), skip_infeasible=not explicit,
    )
    _emit(rc, table, manifest)
    return 0


def verify_command(rc: RunConfig, config: Config) -> int:
    only = _int_list(rc.only, "--only") if rc.only else None
    results = run_acceptance(config, only, out=sys.stdout)
    if rc.manifest is not None:
        payload = {
            "results": [{"name": r.name, "passed": r.passed, "seconds": r.seconds, **r.details} for r in results],
            "versions": provenance(seed=config.series.seed),
        }
        write_text(rc.manifest, json_text(payload))
    return 0 if all(r.passed for r in results) else 1


def report_command(rc: RunConfig, config: Config) -> int:
    if not rc.inputs:
        raise ConfigError("report needs at least one series CSV", flag="inputs")
    missing = [str(p) for p in rc.inputs if not Path(p).is_file()]
    if missing:
        raise ConfigError(f"no such file: {', '.join(missing)}", flag="inputs")
    try:
        table = merge_series_runs(rc.inputs)
    except (ValueError, KeyError) as e:
        raise ConfigError(str(e), flag="inputs")
    _emit(rc, table)
    return 0


HANDLERS = {
    "simulate": simulate_command,
    "constants": constants_command,
    "rates": rates_command,
    "series": series_command,
    "verify": verify_command,
    "report": report_command,
}


def _print_error(error: FbmVarError) -> None:
    print(json.dumps(error.to_dict(), default=str, sort_keys=True), file=sys.stderr)


def run(rc: RunConfig) -> int:
    """Execute one command; 0 on success, 2 on usage errors, 1 on runtime failures."""
    try:
        config = library_config(rc)
        logger.info("command_start", command=rc.command, seed=config.series.seed, workers=config.sampling.workers)
        code = HANDLERS[rc.command](rc, config)
        logger.info("command_done", command=rc.command, exit_code=code)
        return code
    except (ConfigError, RegimeError) as e:
        flag = getattr(e, "flag", None) or ("--hurst" if isinstance(e, RegimeError) else None)
        prefix = f"{flag}: " if flag else ""
        print(f"fbmvar {rc.command}: error: {prefix}{e.message}", file=sys.stderr)
        _print_error(e)
        return 2
    except FbmVarError as e:
        logger.error("command_failed", command=rc.command, error=type(e).__name__)
        _print_error(e)
        return 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        rc = parse_run_config(argv)
    except ConfigError as e:
        print(f"fbmvar: error: {e.flag}: {e.message}", file=sys.stderr)
        return 2
    configure_logging(rc.log_level)
    return run(rc)


if __name__ == "__main__":
    sys.exit(main())
