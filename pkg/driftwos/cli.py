"""Command line front end: solve, validate and sample-exit.

Exit codes: 0 success, 1 configuration or usage error, 2 at least one
degraded estimate (solve) or failed check (validate).
"""

import argparse
import json
import logging
import sys
import tomllib
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from driftwos.config import settings
from driftwos.models.run_config import RunConfig, SolveRecord
from driftwos.services.acceptance import SELECTORS, UnknownSelectorError, run_suite
from driftwos.services.estimator import EstimatorError, estimate_grid, estimate_point
from driftwos.services.geometry import GeometryError
from driftwos.services.sampling import ExitLaw, RngStream, SamplingError, sample_exit_batch
from driftwos.utils.output import directions_to_csv, records_to_csv, records_to_json, write_text

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_DEGRADED = 2


class ConfigError(Exception):
    """Expected error in a run configuration or command line argument."""


def _describe(error: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in item['loc']) or '<root>'}: {item['msg']}"
        for item in error.errors()
    )


def load_run_config(path: str) -> RunConfig:
    """Parse a JSON or TOML run configuration; unknown keys are rejected."""
    config_path = Path(path)
    try:
        text = config_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

    try:
        if config_path.suffix.lower() == ".toml":
            raw = tomllib.loads(text)
        else:
            raw = json.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc

    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(f"invalid config {path}: {_describe(exc)}") from exc


def apply_overrides(
    config: RunConfig, seed: Optional[int] = None, workers: Optional[int] = None
) -> RunConfig:
    execution = dict(config.execution)
    if seed is not None:
        execution["seed"] = seed
    if workers is not None:
        execution["workers"] = workers
    try:
        return RunConfig.model_validate({**dict(config), "execution": execution})
    except ValidationError as exc:
        raise ConfigError(f"invalid override: {_describe(exc)}") from exc


def cmd_solve(
    config_path: str,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    print_config: bool = False,
) -> int:
    try:
        config = apply_overrides(load_run_config(config_path), seed, workers)
    except ConfigError as exc:
        logger.error(str(exc))
        return EXIT_CONFIG_ERROR

    if print_config:
        sys.stdout.write(config.model_dump_json(indent=2) + "\n")
        return EXIT_OK

    problem = config.problem
    execution = config.execution
    logger.info(
        f"Solving on a {problem.dim}-d {problem.domain.shape} with a={problem.a}, b={problem.b}, "
        f"{execution.n_walks} walks, seed {execution.seed}"
    )

    skipped = []
    try:
        if config.query.point is not None:
            estimate = estimate_point(
                problem,
                config.query.point,
                config.walk,
                execution.n_walks,
                execution.seed,
                execution.workers,
            )
            records = [SolveRecord.from_estimate(config.query.point, estimate)]
        else:
            result = estimate_grid(
                problem,
                config.query.grid,
                config.walk,
                execution.n_walks,
                execution.seed,
                execution.workers,
            )
            records = [SolveRecord.from_estimate(node.point, node.estimate) for node in result.nodes]
            skipped = result.skipped
    except (EstimatorError, GeometryError) as exc:
        logger.error(str(exc))
        return EXIT_CONFIG_ERROR

    if config.output.format == "csv":
        text = records_to_csv(records, problem.dim)
    else:
        text = records_to_json(records, skipped)
    write_text(text, config.output.path)

    degraded = sum(record.degraded for record in records)
    logger.info(f"Wrote {len(records)} record(s); {degraded} degraded, {len(skipped)} skipped")
    return EXIT_DEGRADED if degraded else EXIT_OK


def cmd_validate(selector: str, output: Optional[str] = None) -> int:
    try:
        report = run_suite(selector)
    except UnknownSelectorError as exc:
        logger.error(str(exc))
        return EXIT_CONFIG_ERROR

    write_text(report.model_dump_json(indent=2) + "\n", output)
    failed = [check for check in report.checks if not check.passed]
    logger.info(f"{len(report.checks) - len(failed)} of {len(report.checks)} checks passed")
    return EXIT_OK if report.passed else EXIT_DEGRADED


def cmd_sample_exit(
    d: int,
    a: float,
    b: Sequence[float],
    r: float,
    n: int,
    seed: int,
    output: Optional[str] = None,
) -> int:
    try:
        if d < 1 or len(b) != d:
            raise ConfigError(f"invalid dimension: d={d} with a drift of length {len(b)}")
        if not a > 0 or not r > 0:
            raise ConfigError("a and r must be positive")
        if n < 0 or seed < 0:
            raise ConfigError("n and seed must be non-negative")
        law = ExitLaw.from_drift(r, np.asarray(b, dtype=float), a)
    except (ConfigError, SamplingError) as exc:
        logger.error(str(exc))
        return EXIT_CONFIG_ERROR

    draws = sample_exit_batch(law, n, RngStream.for_walk(seed, 0))
    write_text(directions_to_csv(draws.reshape(n, d)), output)
    logger.info(f"Wrote {n} exit directions (concentration {law.concentration:g})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftwos",
        description="Drifted walk-on-spheres solver for a∆u + b·∇u = 0 with Dirichlet data",
    )
    parser.add_argument(
        "--log-level",
        default=settings.log_level,
        choices=["CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"],
        type=str.upper,
        help=f"Log level (default: {settings.log_level})",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="Estimate u at the configured query points")
    solve.add_argument("config", help="Run configuration (.json or .toml)")
    solve.add_argument("--print-config", action="store_true", help="Print the parsed config and exit")
    solve.add_argument("--seed", type=int, default=None, help="Override execution.seed")
    solve.add_argument("--workers", type=int, default=None, help="Override execution.workers")

    validate = commands.add_parser("validate", help="Run the acceptance checks")
    validate.add_argument("selector", choices=[*SELECTORS, "all"])
    validate.add_argument("--output", default=None, help="JSON report path (default: stdout)")

    sample = commands.add_parser("sample-exit", help="Write exit directions from a ball")
    sample.add_argument("--dim", "-d", type=int, required=True)
    sample.add_argument("--a", type=float, default=1.0, help="Diffusion coefficient")
    sample.add_argument("--b", type=float, nargs="+", required=True, help="Drift vector")
    sample.add_argument("--radius", "-r", type=float, default=1.0)
    sample.add_argument("--n", type=int, required=True, help="Number of draws")
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--output", default=None, help="CSV path (default: stdout)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as stop:
        # usage errors share the configuration exit code; --help stays 0
        return EXIT_OK if stop.code in (0, None) else EXIT_CONFIG_ERROR
    logging.basicConfig(
        format="%(asctime)s - %(levelname)s - %(message)s",
        level=getattr(logging, args.log_level),
        stream=sys.stderr,
    )

    if args.command == "solve":
        return cmd_solve(args.config, args.seed, args.workers, args.print_config)
    if args.command == "validate":
        return cmd_validate(args.selector, args.output)
    return cmd_sample_exit(args.dim, args.a, args.b, args.radius, args.n, args.seed, args.output)


if __name__ == "__main__":
    sys.exit(main())
