"""Command-line entry point.

Subcommands:

    run               run the configured (scheme, setting, trial) grid -> CSV
    sweep-stragglers  same grid plus per-count summary CSV and figures
    sweep-lambda      sweep one smoothing parameter over its grid
    tune              grid-search the smoothing pair with least median MSE
    plot              render any CSV as an SVG line chart
    demo              small built-in end-to-end example

Every subcommand is deterministic in ``--seed``: rerunning writes
byte-identical CSV and SVG files.
"""

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .errors import NerccError
from .experiments import (
    LAMBDA_SUMMARY_COLUMNS,
    STRAGGLER_SUMMARY_COLUMNS,
    TUNE_COLUMNS,
    ExperimentConfig,
    load_config,
    run_experiment,
    summarize_by_stragglers,
    sweep_lambda,
    tune_lambdas,
    write_csv,
    write_metrics_csv,
)
from .plotting import render_plot


def _add_common(parser, config_required=True):
    parser.add_argument("--config", required=config_required, help="experiment config (JSON)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", default=None, help="override the output directory")


def _load(args) -> tuple[ExperimentConfig, Path, Path]:
    config = load_config(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.out is not None:
        config = replace(config, out=args.out)
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    return config, out_dir, Path(args.config).parent


def _cmd_run(args) -> int:
    config, out_dir, base = _load(args)
    rows = run_experiment(config, csv_path=out_dir / "run.csv", base_dir=base)
    ok = sum(1 for r in rows if r.status == "ok")
    print(f"wrote {out_dir / 'run.csv'} ({len(rows)} rows, {ok} decodable)")
    return 0


def _cmd_sweep_stragglers(args) -> int:
    config, out_dir, base = _load(args)
    rows = run_experiment(config, csv_path=out_dir / "sweep_stragglers.csv", base_dir=base)
    summary = summarize_by_stragglers(config, rows)
    write_csv(out_dir / "sweep_stragglers_summary.csv", STRAGGLER_SUMMARY_COLUMNS, summary)
    figures = [
        render_plot(
            out_dir / "sweep_stragglers_summary.csv",
            "stragglers",
            "median_mse",
            "scheme",
            out_dir / "sweep_stragglers_mse.svg",
            title="reconstruction error vs stragglers",
        )
    ]
    if any(s["median_agreement"] == s["median_agreement"] for s in summary):  # any non-NaN
        figures.append(
            render_plot(
                out_dir / "sweep_stragglers_summary.csv",
                "stragglers",
                "median_agreement",
                "scheme",
                out_dir / "sweep_stragglers_agreement.svg",
                title="prediction agreement vs stragglers",
            )
        )
    print(f"wrote {out_dir / 'sweep_stragglers.csv'} ({len(rows)} rows)")
    for figure in figures:
        print(f"wrote {figure}")
    return 0


def _cmd_sweep_lambda(args) -> int:
    config, out_dir, base = _load(args)
    detail, summary = sweep_lambda(config, axis=args.axis, base_dir=base)
    write_metrics_csv(out_dir / "sweep_lambda.csv", detail)
    write_csv(out_dir / "sweep_lambda_summary.csv", LAMBDA_SUMMARY_COLUMNS, summary)
    figure = render_plot(
        out_dir / "sweep_lambda_summary.csv",
        "lambda_value",
        "median_mse",
        "axis",
        out_dir / "sweep_lambda_mse.svg",
        title=f"reconstruction error vs lambda_{args.axis}",
    )
    best = min(summary, key=lambda s: (s["median_mse"], s["lambda_value"]))
    print(f"wrote {out_dir / 'sweep_lambda.csv'} ({len(detail)} rows)")
    print(f"wrote {figure}")
    print(f"best lambda_{args.axis} = {best['lambda_value']:g} (median MSE {best['median_mse']:.6g})")
    return 0


def _cmd_tune(args) -> int:
    config, out_dir, base = _load(args)
    (best_enc, best_dec), table = tune_lambdas(config, base_dir=base)
    write_csv(out_dir / "tune.csv", TUNE_COLUMNS, table)
    print(f"wrote {out_dir / 'tune.csv'} ({len(table)} grid points)")
    print(f"selected lambda_enc={best_enc:g} lambda_dec={best_dec:g}")
    return 0


def _cmd_plot(args) -> int:
    path = render_plot(args.csv, args.x, args.y, args.group, args.out, title=args.title)
    print(f"wrote {path}")
    return 0


DEMO_CONFIG = {
    "N": 60,
    "K": 15,
    "schemes": ["nercc", "nercc-ag", "bacc"],
    "model": {"kind": "rbf-mixture", "d": 6, "m": 4, "centers": 5, "sigma": 2.5, "seed": 7},
    "dataset": {"kind": "smooth-curve", "d": 6, "components": 3},
    "stragglers": {"mode": "fixed-count", "counts": [0, 15, 30, 45]},
    "lambda_enc": 1e-4,
    "lambda_dec": 1e-4,
    "trials": 8,
    "seed": 2024,
}


def _cmd_demo(args) -> int:
    doc = dict(DEMO_CONFIG)
    if args.seed is not None:
        doc["seed"] = args.seed
    doc["out"] = args.out
    config = ExperimentConfig(**doc)
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "demo_config.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")

    rows = run_experiment(config, csv_path=out_dir / "demo.csv")
    summary = summarize_by_stragglers(config, rows)
    write_csv(out_dir / "demo_summary.csv", STRAGGLER_SUMMARY_COLUMNS, summary)
    render_plot(
        out_dir / "demo_summary.csv",
        "stragglers",
        "median_mse",
        "scheme",
        out_dir / "demo_mse.svg",
        title="coded-computing demo: error vs stragglers",
    )
    print(f"wrote {out_dir / 'demo.csv'}, demo_summary.csv, demo_mse.svg")
    print(f"{'scheme':>10} {'stragglers':>10} {'median MSE':>14}")
    for entry in summary:
        print(f"{entry['scheme']:>10} {entry['stragglers']:>10} {entry['median_mse']:>14.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nercc",
        description="coded-computing lab: spline/Berrut codecs, straggler simulation, sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the configured experiment grid")
    _add_common(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep-stragglers", help="straggler sweep with summary and figures")
    _add_common(p)
    p.set_defaults(func=_cmd_sweep_stragglers)

    p = sub.add_parser("sweep-lambda", help="sweep one smoothing parameter")
    _add_common(p)
    p.add_argument("--axis", choices=("enc", "dec"), default="dec")
    p.set_defaults(func=_cmd_sweep_lambda)

    p = sub.add_parser("tune", help="grid-search both smoothing parameters")
    _add_common(p)
    p.set_defaults(func=_cmd_tune)

    p = sub.add_parser("plot", help="render a CSV as an SVG line chart")
    p.add_argument("--csv", required=True)
    p.add_argument("--x", required=True, help="x-axis column")
    p.add_argument("--y", required=True, help="y-axis column")
    p.add_argument("--group", default=None, help="one line per value of this column")
    p.add_argument("--out", required=True, help="output SVG path")
    p.add_argument("--title", default=None)
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("demo", help="small built-in end-to-end example")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="demo_out")
    p.set_defaults(func=_cmd_demo)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NerccError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
