"""
Command-line entry point: `simcache run | experiment | trace`.
"""

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

from ..exception.custom_exception import ConfigError, OutputError, SimCacheException
from ..logger import GLOBAL_LOGGER as log
from ..utils.config_loader import load_config, load_config_file, load_defaults, load_experiment_settings
from ..workflow.experiments import ExperimentName, emit_csv, run_experiment
from ..workflow.simulation_workflow import load_workload, run_single
from ..workload.trace_io import write_trace

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _load_env() -> None:
    if os.getenv("SIMCACHE_ENV", "local").lower() != "production":
        load_dotenv()


def _seed_overrides(seed: Optional[int]) -> list[str]:
    if seed is not None:
        return [f"seed={seed}"]
    env_seed = os.getenv("SIMCACHE_SEED")
    if env_seed:
        try:
            return [f"seed={int(env_seed)}"]
        except ValueError as e:
            raise ConfigError(f"SIMCACHE_SEED must be an integer, got {env_seed!r}", key="SIMCACHE_SEED", error_details=e) from e
    return []


def _config(path: Optional[str], overrides: list[str]):
    if path:
        return load_config_file(path, overrides)
    return load_config(None, overrides)


def cmd_run(args: argparse.Namespace) -> int:
    overrides = list(args.set) + _seed_overrides(args.seed)
    if args.deterministic:
        overrides.append("deterministic=true")
    cfg = _config(args.config, overrides)
    summary = run_single(cfg)
    payload = summary.model_dump(mode="json")
    payload.update(
        miss_rate_per_instruction=summary.miss_rate_per_instruction,
        miss_rate_per_access=summary.miss_rate_per_access,
        l2_l1_ratio=summary.l2_l1_ratio,
        l3_l2_ratio=summary.l3_l2_ratio,
    )
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    defaults = load_defaults()
    settings, overrides = load_experiment_settings(args.set, defaults)
    overrides += _seed_overrides(args.seed)
    if args.deterministic:
        overrides.append("deterministic=true")
    cfg = _config(args.config, overrides)
    table = run_experiment(args.name, cfg, settings, seeds=args.seeds, workers=args.workers)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as f:
                emit_csv(table, f)
        except OSError as e:
            raise OutputError(f"cannot write experiment CSV: {e}", path=args.out, error_details=e) from e
        log.info("Experiment written", experiment=args.name, path=args.out, points=len(table.rows))
    else:
        emit_csv(table, sys.stdout)
    return EXIT_OK


def cmd_trace(args: argparse.Namespace) -> int:
    cfg = _config(args.config, list(args.set) + _seed_overrides(args.seed))
    streams = load_workload(cfg, cfg.seed)
    try:
        with open(args.out, "wb") as f:
            write_trace(streams, f)
    except OSError as e:
        raise OutputError(f"cannot write trace: {e}", path=args.out, error_details=e) from e
    log.info("Trace written", path=args.out, threads=len(streams), instructions=sum(len(s) for s in streams))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simcache", description="Cache hierarchy / multithreaded processor simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one simulation run, summary as JSON")
    run.add_argument("--config", required=True, help="flat key=value config file")
    run.add_argument("--seed", type=int)
    run.add_argument("--deterministic", action="store_true", help="use mean latencies, no jitter")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    run.set_defaults(handler=cmd_run)

    exp = sub.add_parser("experiment", help="canned sweep, aggregated over seeds, as CSV")
    exp.add_argument("--name", required=True, choices=[n.value for n in ExperimentName])
    exp.add_argument("--config", help="flat key=value config file")
    exp.add_argument("--seeds", type=int, help="ensemble size (default: config `seeds`)")
    exp.add_argument("--seed", type=int, help="first seed of the ensemble")
    exp.add_argument("--out", help="CSV path (default: stdout)")
    exp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    exp.add_argument("--workers", type=int, default=1, help="parallel runs")
    exp.add_argument("--deterministic", action="store_true")
    exp.set_defaults(handler=cmd_experiment)

    trace = sub.add_parser("trace", help="dump the generated workload")
    trace.add_argument("--config", required=True)
    trace.add_argument("--out", required=True)
    trace.add_argument("--seed", type=int)
    trace.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    trace.set_defaults(handler=cmd_trace)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    _load_env()
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as e:
        log.error("Configuration error", command=args.command, key=e.key, line=e.line, error=e.error_message)
        return EXIT_CONFIG
    except SimCacheException as e:
        log.error("Simulation failed", command=args.command, error_type=type(e).__name__, error=e.error_message)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
