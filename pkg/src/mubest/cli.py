"""Command-line entry point."""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from . import harness


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="flat key = value config file")
    parser.add_argument("--seed", type=int, default=None, help="override master_seed")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker threads")
    parser.add_argument("--timing", action="store_true",
                        help="fill wall_time_s (breaks byte-for-byte determinism)")


def _build_config(args, defaults: dict | None = None) -> harness.ExperimentConfig:
    data: dict[str, str] = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            data = harness.parse_config_text(fh.read())
    if defaults:
        data = {**defaults, **data}
    config = harness.config_from_mapping(data)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    return config


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mubest",
        description="One-shot black-box optimization experiments: sample a batch in "
                    "parallel, recommend a point, measure the simple regret.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("sweep-ratio", "regret across a grid of selection ratios mu/lambda"),
        ("rate-fit", "log-log convergence-rate fit per estimator"),
        ("compare", "pairwise win-rate matrix of sampler+estimator methods"),
        ("hull-demo", "contrast the two hull-based mu selection rules"),
    ):
        _common(sub.add_parser(name, help=text))
    args = parser.parse_args(argv)

    if args.command == "hull-demo":
        seed = args.seed if args.seed is not None else 0
        _emit(harness.hull_demo(seed=seed), args.out)
        return 0

    if args.command == "sweep-ratio":
        config = _build_config(args)
        records = harness.sweep_ratio(config, jobs=args.jobs)
        _emit(harness.render_records_csv(records, timing=args.timing), args.out)
        return 0

    if args.command == "rate-fit":
        config = _build_config(args)
        records, fits = harness.rate_fit_experiment(config, jobs=args.jobs)
        _emit(harness.render_records_csv(records, timing=args.timing), args.out)
        for label, fit in fits.items():
            print(f"rate-fit {label}: slope={fit.slope:.4f} residual={fit.residual:.4f} "
                  f"n={fit.n_points}", file=sys.stderr)
        return 0

    config = _build_config(args, defaults=harness.COMPARE_DEFAULTS)
    result = harness.compare(config, jobs=args.jobs)
    _emit(harness.render_win_matrix_csv(result), args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
