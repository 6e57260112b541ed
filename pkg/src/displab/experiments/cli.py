"""Command-line interface.

Subcommands::

    displab list
    displab run NAME --n N[,N2,...] --trials T --seed S [--param k=v]...
                [--out FILE] [--format csv|json] [--plot FILE.svg] [--workers W]
    displab calibrate --out constants.json [--seed S]

Exit status 0 when every bounded statistic passes (or is informational),
1 when any fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from .catalog import CATALOG, UnknownExperimentError, run_experiment
from .reports import ExperimentConfig, ReportRecord, write_report

__all__ = ["main"]


def _parse_params(pairs: list[str]) -> dict:
    params = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"--param expects key=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    return params


def _parse_ns(text: str) -> list[int]:
    ns = [int(part) for part in text.split(",") if part.strip()]
    if not ns:
        raise ValueError("--n must list at least one dimension")
    return ns


def _print_record(rec: ReportRecord) -> None:
    c = rec.config
    print(f"{c.name} n={c.n} trials={c.trials} seed={c.seed} "
          f"[{rec.verdict_label()}] ({rec.wall_time_s:.2f}s)")
    for row in rec.statistics:
        tail = ""
        if row.bound is not None:
            rel = {"two-sided": "~", "upper": "<=", "lower": ">="}[row.cmp]
            verdict = "pass" if row.passed else "FAIL"
            tail = f"  {rel} {row.bound:.6g} (3 SE)  [{verdict}]"
        print(f"  {row.label}: {row.value:.6g} +- {row.stderr:.3g}{tail}")


def _plot_records(records: list[ReportRecord], path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels: list[str] = []
    for rec in records:
        for row in rec.statistics:
            if row.label not in labels:
                labels.append(row.label)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label in labels:
        xs, ys, es = [], [], []
        for rec in records:
            for row in rec.statistics:
                if row.label == label:
                    xs.append(rec.config.n)
                    ys.append(row.value)
                    es.append(3 * row.stderr)
        ax.errorbar(xs, ys, yerr=es, marker="o", capsize=3, label=label)
    ax.set_xlabel("n")
    ax.set_ylabel("statistic")
    ax.set_title(records[0].config.name)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _cmd_list() -> int:
    width = max(len(name) for name in CATALOG)
    for name, (_, params, desc) in CATALOG.items():
        extra = f" (params: {', '.join(sorted(params))})" if params else ""
        print(f"{name:<{width}}  {desc}{extra}")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        params = _parse_params(args.param)
        ns = _parse_ns(args.n)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    records = []
    for n in ns:
        cfg = ExperimentConfig(name=args.name, n=n, trials=args.trials, seed=args.seed, params=params)
        try:
            rec = run_experiment(cfg, workers=args.workers)
        except UnknownExperimentError as exc:
            print(f"error: {exc.args[0]}", file=sys.stderr)
            return 2
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        _print_record(rec)
        records.append(rec)
    if args.out:
        write_report(records, args.format, args.out)
    if args.plot:
        _plot_records(records, args.plot)
    return 1 if any(rec.passed is False for rec in records) else 0


def _cmd_calibrate(args: argparse.Namespace) -> int:
    from .calibrate import run_calibration

    constants = run_calibration(seed=args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(constants, fh, indent=2)
        fh.write("\n")
    for key, value in constants.items():
        print(f"{key}: {value}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="displab", description="convex-geometry oracle laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list catalog experiments")

    p_run = sub.add_parser("run", help="run one experiment (possibly over several n)")
    p_run.add_argument("name")
    p_run.add_argument("--n", default="10", help="dimension, or comma list for a sweep")
    p_run.add_argument("--trials", type=int, default=10_000)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--param", action="append", default=[], metavar="K=V")
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--format", choices=("csv", "json"), default="csv")
    p_run.add_argument("--plot", default=None, metavar="FILE.svg")
    p_run.add_argument("--workers", type=int, default=1)

    p_cal = sub.add_parser("calibrate", help="measure and freeze the calibrated constants")
    p_cal.add_argument("--out", required=True)
    from .calibrate import CALIBRATION_SEED

    p_cal.add_argument("--seed", type=int, default=CALIBRATION_SEED)

    args = parser.parse_args(argv)
    if args.command == "list":
        return _cmd_list()
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_calibrate(args)


if __name__ == "__main__":
    raise SystemExit(main())
