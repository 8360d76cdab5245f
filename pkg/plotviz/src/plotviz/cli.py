"""plotviz command line: `plotviz trial ...` and `plotviz sweep ...`."""

from __future__ import annotations

import argparse
import sys

from .plots import PlotRequest, PlotvizError, plot_sweep, plot_trial


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plotviz")
    sub = p.add_subparsers(dest="cmd", required=True)

    trial = sub.add_parser("trial", help="two-panel force/velocity trial figure")
    trial.add_argument("trace", help="trace.csv from a simulator run")
    trial.add_argument("--summary", default=None,
                       help="summary.json (adds the setpoint reference line)")
    trial.add_argument("-o", "--out", required=True)
    trial.add_argument("--style", choices=("paper", "plain"), default="paper")

    sweep = sub.add_parser("sweep", help="rms/settle-time overview of a sweep")
    sweep.add_argument("sweep_csv", help="sweep.csv from the sweep command")
    sweep.add_argument("-o", "--out", required=True)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "trial":
            out = plot_trial(PlotRequest(trace_path=args.trace,
                                         out_path=args.out,
                                         summary_path=args.summary,
                                         style=args.style))
        else:
            out = plot_sweep(args.sweep_csv, args.out)
    except (PlotvizError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
