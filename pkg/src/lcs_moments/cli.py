"""Command line front end.

Usage:
    lcs-moments <moments|scaling|swap|chain-law|bounds|oracle> [options]

Options override fields of an optional JSON config file; the environment
variable LCS_MOMENTS_SEED overrides the seed from either source. Exit codes:
0 success, 1 invalid configuration, 2 oracle failure, 3 budget exhaustion.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import experiments, reporting
from .bounds import default_bound_reports
from .experiments import ConfigError, DegenerateDataError, ExperimentConfig
from .words import DistributionError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CHECK_FAILED = 2
EXIT_BUDGET = 3


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(","))


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcs-moments",
        description="Monte Carlo experiments on the LCS of two random words",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in experiments.KINDS:
        p = sub.add_parser(kind)
        p.add_argument("--config", help="JSON config file; flags override its fields")
        p.add_argument("--n", type=int)
        p.add_argument("--n-grid", type=_parse_ints, metavar="a,b,c")
        p.add_argument("--dist", type=_parse_floats, metavar="p1,p2,...")
        p.add_argument("--dominant", type=int)
        p.add_argument("--replicates", type=int)
        p.add_argument("--r", type=_parse_floats, metavar="1,2,3", dest="r_values")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--out", help="output path; stdout when omitted")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--emit-config", action="store_true",
                       help="print the fully resolved config and exit")
        p.add_argument("--emit-distribution", action="store_true",
                       help="moments: include the empirical LC distribution")
        p.add_argument("--bn-stratify", action="store_true",
                       help="swap: stratify by favorable-set membership (desk scale)")
        p.add_argument("--bn-K", type=float)
    return parser


_OVERRIDABLE = (
    "n", "n_grid", "dist", "dominant", "replicates", "r_values",
    "seed", "threads", "out", "format",
)


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    data["kind"] = args.kind
    for name in _OVERRIDABLE:
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    if args.emit_distribution:
        data["emit_distribution"] = True
    if args.bn_stratify:
        data["bn_stratify"] = True
    if getattr(args, "bn_K", None) is not None:
        data["bn_K"] = args.bn_K
    env_seed = os.environ.get("LCS_MOMENTS_SEED")
    if env_seed is not None:
        data["seed"] = int(env_seed)
    if data.get("kind") == "moments" and "n" in data and "n_grid" not in data:
        data["n_grid"] = None
    cfg = ExperimentConfig.from_dict(data)
    cfg.validate()
    return cfg


def _run(cfg: ExperimentConfig) -> tuple[object, int]:
    if cfg.kind == "moments":
        estimates = experiments.estimate_moments(cfg)
        distribution = None
        if cfg.emit_distribution:
            dist = cfg.alphabet()
            distribution = {
                str(n): experiments.lc_distribution(
                    experiments.sample_lc_values(dist, n, cfg.replicates, cfg.seed, cfg.threads)
                )
                for n in cfg.sizes()
            }
        return reporting.moments_payload(cfg, estimates, distribution), EXIT_OK
    if cfg.kind == "scaling":
        estimates, fits = experiments.scaling_experiment(cfg)
        return reporting.scaling_payload(cfg, estimates, fits), EXIT_OK
    if cfg.kind == "swap":
        result = experiments.swap_probability_experiment(cfg)
        return reporting.swap_payload(cfg, result), EXIT_OK
    if cfg.kind == "chain-law":
        result = experiments.chain_law_test(cfg)
        return reporting.chain_law_payload(cfg, result), EXIT_OK
    if cfg.kind == "bounds":
        n = int(cfg.n if cfg.n is not None else cfg.sizes()[0])
        reports = default_bound_reports(cfg.dist, cfg.dominant, n, cfg.r_values)
        return reporting.bounds_payload(reports), EXIT_OK
    if cfg.kind == "oracle":
        report = experiments.oracle_suite(cfg)
        code = EXIT_OK
        if report.budget_exhausted:
            code = EXIT_BUDGET
        if not report.all_passed:
            code = EXIT_CHECK_FAILED
        return reporting.oracle_payload(cfg, report), code
    raise ConfigError(f"unknown kind {cfg.kind!r}")


def _emit(cfg: ExperimentConfig, payload) -> None:
    if cfg.format == "json":
        text = reporting.to_json_text(payload)
    else:
        text = reporting.CSV_RENDERERS[cfg.kind](payload)
    if cfg.out:
        with open(cfg.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad usage; map to the config error code
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = resolve_config(args)
    except (ConfigError, DistributionError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.emit_config:
        sys.stdout.write(reporting.to_json_text(cfg.to_dict()))
        return EXIT_OK
    try:
        payload, code = _run(cfg)
    except (ConfigError, DistributionError, DegenerateDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(cfg, payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
