"""Command-line entry point.

``analyze`` runs the whole pipeline and writes tables and figures. The other
subcommands run only the stages behind one table group and print it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .core import DEFAULT_KEEP
from .pipeline import FORMATS, STAGES, PipelineConfig, run_pipeline
from .plots import emit_plots
from .prep import DEFAULT_THRESHOLD
from .render import available_tables, emit_tables, render_table

SUBCOMMANDS = {
    # name: (stages needed, tables printed)
    "stats": (("descriptives", "correlations"), ("table1",)),
    "breaks": (("fluctuation", "segments"), ("table2", "table3", "table4")),
    "coint": (("cointegration",), ("table5",)),
    "wavelet": (("cross_wavelet",), ()),
    "ndiffs": (("segments", "integration_order"), ("table6",)),
}


def _use_color(stream) -> bool:
    return not os.environ.get("IPSERIES_NO_COLOR") and hasattr(stream, "isatty") and stream.isatty()


def _paint(text: str, status: str, color: bool) -> str:
    if not color:
        return text
    code = {"ok": "32", "skipped": "33", "failed": "31"}.get(status, "0")
    return f"\033[{code}m{text}\033[0m"


def _formats(text: str) -> tuple[str, ...]:
    items = tuple(x.strip() for x in text.split(",") if x.strip())
    bad = [x for x in items if x not in FORMATS]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"formats must be a comma list drawn from {','.join(FORMATS)}")
    return items


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", type=str, default=None,
                   help="CSV file (default: bundled USPTO monthly counts)")
    p.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p.add_argument("--h", type=float, default=0.15, help="MOSUM window / minimum regime fraction")
    p.add_argument("--lags", type=int, default=2, help="Johansen lag order K")
    p.add_argument("--truncate", type=int, default=DEFAULT_KEEP, help="months kept from the start")
    p.add_argument("--outlier-threshold", type=float, default=DEFAULT_THRESHOLD,
                   help="minimum outlier score")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ipseries", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run every stage and write reports")
    _common(a)
    a.add_argument("--out", type=str, required=True, help="output directory")
    a.add_argument("--formats", type=_formats, default=FORMATS,
                   help="comma list of json,md,csv,svg")

    for name in SUBCOMMANDS:
        s = sub.add_parser(name, help=f"run the {name} stages and print the result")
        _common(s)
        s.add_argument("--format", choices=("md", "csv", "json"), default="md")
    return parser


def _config(args, stages=None, formats=FORMATS) -> PipelineConfig:
    return PipelineConfig(
        input=args.input,
        truncate_to=args.truncate,
        outlier_threshold=args.outlier_threshold,
        h=args.h,
        alpha=args.alpha,
        johansen_lags=args.lags,
        formats=tuple(formats),
        stages=stages,
    )


def _print_stages(report, stream) -> None:
    color = _use_color(stream)
    for name in STAGES:
        rec = report.stages.get(name)
        if rec is None:
            continue
        line = f"{name:<18} {rec.status}"
        if rec.reason:
            line += f"  ({rec.reason})"
        print(_paint(line, rec.status, color), file=stream)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.input is not None and not Path(args.input).is_file():
        parser.error(f"input file not found: {args.input}")
    try:
        if args.command == "analyze":
            cfg = _config(args, formats=args.formats)
        else:
            cfg = _config(args, stages=SUBCOMMANDS[args.command][0])
    except ValueError as exc:
        parser.error(str(exc))

    report = run_pipeline(cfg)

    if args.command == "analyze":
        out = Path(args.out)
        try:
            emit_tables(report, out, [f for f in cfg.formats if f != "svg"])
            if "svg" in cfg.formats:
                emit_plots(report, out)
        except OSError as exc:
            print(f"error: cannot write output: {exc}", file=sys.stderr)
            return 1
        _print_stages(report, sys.stderr)
        return report.exit_code

    data = report.to_dict()
    tables = SUBCOMMANDS[args.command][1]
    if args.format == "json" or not tables:
        keys = {"stats": ("table1", "correlations"), "breaks": ("table2", "table3", "table4"),
                "coint": ("table5",), "wavelet": ("cross_wavelet",),
                "ndiffs": ("table6",)}[args.command]
        payload = {k: data[k] for k in keys if k in data}
        if args.command == "wavelet" and "cross_wavelet" in payload:
            cw = payload["cross_wavelet"]
            payload = {"cross_wavelet": {k: cw[k] for k in ("alpha", "ar1", "summary")}}
        print(json.dumps(payload, sort_keys=True, indent=1))
    else:
        for name in tables:
            if name in available_tables(data):
                # csv already ends its last row; markdown gets a blank separator
                print(render_table(data, name, args.format), end="" if args.format == "csv" else "\n")
        if args.command == "stats" and "correlations" in data:
            c = data["correlations"]
            print(f"Spearman {c['spearman']:.7f}  Kendall {c['kendall']:.7f}")
    _print_stages(report, sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
