"""Command-line entry point: ``imodleach run|sweep|plot|check``.

Exit codes: 0 success, 1 configuration or usage error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import statistics
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from imodleach.harness.checks import AcceptanceSuite
from imodleach.harness.config import SweepSpec, parse_config
from imodleach.harness.csvio import SWEEP_HEADER, TRACE_HEADER, read_header, write_sweep_csv, write_trace_csv
from imodleach.harness.plot import emit_plot
from imodleach.harness.sweep import run_sweep
from imodleach.model import ConfigError, NetworkConfig
from imodleach.protocol import run_simulation

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _load(path: Optional[str]):
    return parse_config(Path(path) if path else None)


def cmd_run(args) -> int:
    config = _load(args.config)
    if isinstance(config, SweepSpec):
        raise ConfigError("document", "run expects a single configuration, not a sweep")
    if args.seed is not None:
        config = replace(config, seed=args.seed)
        config.validate()
    records, summary = run_simulation(config)
    write_trace_csv(records, args.out)
    print(f"rounds={len(records)} first_dead={summary.first_dead_round} last_dead={summary.last_dead_round} "
          f"packets_to_bs={summary.total_packets_to_bs} packets_to_ch={summary.total_packets_to_ch} "
          f"ratio_x={summary.ratio_x} k1={summary.k1} k2={summary.k2}")
    print(f"trace written to {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = _load(args.spec)
    if isinstance(spec, NetworkConfig):
        spec = SweepSpec(spec, (spec.protocol.p,), (spec.protocol.h,), (spec.protocol.s,), (spec.sink,))
    print(f"running {spec.size} simulations")
    result = run_sweep(spec, workers=args.workers)
    write_sweep_csv(result, args.out)
    for (p, h, s, sink), cell in result.averaged(args.stat).items():
        print(f"p={p:g} h={h:g} s={s:g} sink={sink}: first_dead={_r(cell.first_dead_round)} "
              f"last_dead={_r(cell.last_dead_round)} bs={cell.packets_to_bs:.0f} ch={cell.packets_to_ch:.0f} "
              f"censored={cell.censored}/{cell.runs}")
    print(f"sweep written to {args.out}")
    return EXIT_OK


def _r(value):
    return "-" if value is None else f"{value:.1f}"


def _plot_series(paths: Sequence[str], metric: str, x: Optional[str]) -> Dict[str, tuple]:
    series: Dict[str, tuple] = {}
    for path in paths:
        header = read_header(path)
        if header == TRACE_HEADER:
            xcol, group_cols = x or "round", []
        elif header == SWEEP_HEADER:
            xcol = x or "p"
            group_cols = [c for c in ("p", "h", "s", "sink") if c != xcol]
        else:
            raise ConfigError("input", f"{path} is neither a trace nor a sweep CSV")
        for col in (xcol, metric):
            if col not in header:
                raise ConfigError("metric" if col == metric else "x", f"{col!r} is not a column of {path}")
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        groups: Dict[tuple, Dict[float, List[float]]] = {}
        for row in rows:
            if row[metric] == "":
                continue
            key = tuple(row[c] for c in group_cols)
            groups.setdefault(key, {}).setdefault(float(row[xcol]), []).append(float(row[metric]))
        for key, points in groups.items():
            name = Path(path).stem
            if group_cols:
                name += " " + " ".join(f"{c}={v}" for c, v in zip(group_cols, key))
            xs = sorted(points)
            series[name] = (xs, [statistics.mean(points[v]) for v in xs])
    return series


def cmd_plot(args) -> int:
    for path in args.input:
        if not Path(path).is_file():
            raise FileNotFoundError(2, "no such file", path)
    series = _plot_series(args.input, args.metric, args.x)
    if not series:
        raise ConfigError("metric", f"no values for {args.metric!r} in the input")
    xlabel = args.x or ("round" if read_header(args.input[0]) == TRACE_HEADER else "p")
    emit_plot(series, args.out, title=args.title or args.metric, xlabel=xlabel, ylabel=args.metric)
    print(f"figure written to {args.out}")
    return EXIT_OK


def cmd_check(args) -> int:
    suite = AcceptanceSuite(seeds=range(1, args.seeds + 1), workers=args.workers)
    results = []
    for check in suite.criteria():
        result = check()
        print(result.line(), flush=True)
        results.append(result)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} criteria passed")
    return EXIT_OK if failed == 0 else EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="imodleach", description="LEACH / MODLEACH / iMODLEACH round simulator")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    run = sub.add_parser("run", help="run one simulation and write its round trace")
    run.add_argument("--config", help="YAML config document (defaults apply when omitted)")
    run.add_argument("--seed", type=int, help="override the master seed")
    run.add_argument("--out", default="trace.csv", help="trace CSV path (default: trace.csv)")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="run a parameter sweep and write one row per run")
    sweep.add_argument("spec", help="YAML sweep document")
    sweep.add_argument("--out", default="sweep.csv", help="sweep CSV path (default: sweep.csv)")
    sweep.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    sweep.add_argument("--stat", choices=("mean", "median"), default="mean", help="seed aggregation shown")
    sweep.set_defaults(func=cmd_sweep)

    plot = sub.add_parser("plot", help="draw a metric from trace or sweep CSVs as SVG")
    plot.add_argument("input", nargs="+", help="trace or sweep CSV file(s)")
    plot.add_argument("--metric", required=True, help="column to plot, e.g. alive")
    plot.add_argument("--x", help="x-axis column (default: round for traces, p for sweeps)")
    plot.add_argument("--title")
    plot.add_argument("--out", required=True, help="output SVG path")
    plot.set_defaults(func=cmd_plot)

    check = sub.add_parser("check", help="run the built-in acceptance suite")
    check.add_argument("--workers", type=int, default=1)
    check.add_argument("--seeds", type=int, default=10, help="number of seeds per cell")
    check.set_defaults(func=cmd_check)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            raise UsageError("imodleach: error: a subcommand is required")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
