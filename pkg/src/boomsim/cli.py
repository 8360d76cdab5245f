"""Command-line interface: run / gains / sweep / verify.

Exit codes: 0 success, 1 usage or config error, 2 divergence,
3 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from . import verify as verify_mod
from .compliance import StiffnessModel, equivalent_stiffness
from .config import apply_overrides, config_from_dict, load_config
from .control import AdmittanceSpec, schedule_gains
from .errors import BoomsimError, ConfigError
from .harness import run_scenario, stability_bound
from .model import JointState


def _parse_inf(text: str) -> float:
    return math.inf if text.lower() in ("inf", "infinity") else float(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boomsim")
    sub = p.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="run a scenario and write trace/summary")
    run.add_argument("--config", required=True)
    run.add_argument("--out-dir", default="out")
    run.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY=VALUE", help="dotted-path config override")
    run.add_argument("--seed", type=int, default=None)

    gains = sub.add_parser("gains", help="print scheduled gains for a pose")
    gains.add_argument("--omega-n", type=float, default=10.0)
    gains.add_argument("--eta", type=float, default=1.0)
    gains.add_argument("--mass", type=float, default=1.0)
    gains.add_argument("--k-theta", type=float, default=60.0)
    gains.add_argument("--k-ee", type=_parse_inf, default=math.inf)
    gains.add_argument("--theta1", type=float, default=math.pi / 2)
    gains.add_argument("--d2", type=float, default=1.0)
    gains.add_argument("--json", action="store_true")

    sweep = sub.add_parser("sweep", help="run one scenario per swept value")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--key", required=True, help="dotted config path to sweep")
    sweep.add_argument("--values", required=True,
                       help="comma-separated values for the swept key")
    sweep.add_argument("--out-dir", default="sweep_out")
    sweep.add_argument("--set", dest="overrides", action="append", default=[])
    sweep.add_argument("--seed", type=int, default=None)

    ver = sub.add_parser("verify", help="run the built-in invariant checks")
    ver.add_argument("--list", action="store_true", dest="list_checks")
    ver.add_argument("--only", action="append", default=None,
                     help="run only the named check (repeatable)")
    return p


def _write_run(out_dir: Path, trace, summary):
    out_dir.mkdir(parents=True, exist_ok=True)
    trace.write_csv(out_dir / "trace.csv")
    with open(out_dir / "summary.json", "w") as fh:
        fh.write(summary.to_json())


def _summary_line(summary) -> str:
    rms = summary.rms_force_error_after_contact
    return (f"rms={rms:.4f}N " if rms is not None else "rms=n/a ") + \
        (f"settle={summary.settle_time:.3f}s " if summary.settle_time is not None
         else "settle=n/a ") + \
        f"phases={summary.phase_boundaries} diverged={summary.diverged}"


def cmd_run(args) -> int:
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"world.seed={args.seed}")
    cfg = load_config(args.config, overrides)
    trace, summary = run_scenario(cfg)
    _write_run(Path(args.out_dir), trace, summary)
    print(_summary_line(summary))
    return 2 if summary.diverged else 0


def cmd_gains(args) -> int:
    if args.d2 <= 0:
        raise ConfigError("d2 must be > 0")
    spec = AdmittanceSpec(args.omega_n, args.eta, args.mass)
    stiff = StiffnessModel(k_theta=args.k_theta, k_ee=args.k_ee)
    k_eq = equivalent_stiffness(stiff, JointState(args.theta1, args.d2))
    g = schedule_gains(spec, k_eq)
    bound = stability_bound(spec, k_eq).max_stable_dt
    if args.json:
        print(json.dumps({"k_eq": k_eq, "k_f": g.k_f, "b": g.b,
                          "max_stable_dt_force": bound}))
    else:
        print(f"{'k_eq':>20} {k_eq:12.4f} N/m")
        print(f"{'K_f':>20} {g.k_f:12.4f}")
        print(f"{'B':>20} {g.b:12.4f} N*s/m")
        print(f"{'max dt_force':>20} {bound:12.4f} s")
    return 0


def cmd_sweep(args) -> int:
    values = [v for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("sweep needs a non-empty value list")
    base_overrides = list(args.overrides)
    if args.seed is not None:
        base_overrides.append(f"world.seed={args.seed}")

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    any_diverged = False
    for raw in values:
        cfg = load_config(args.config, base_overrides + [f"{args.key}={raw}"])
        trace, summary = run_scenario(cfg)
        run_dir = out_dir / f"{args.key.replace('.', '_')}_{raw.strip()}"
        _write_run(run_dir, trace, summary)
        rms = summary.rms_force_error_after_contact
        rows.append((raw.strip(),
                     "" if rms is None else f"{rms:.9g}",
                     "" if summary.settle_time is None else f"{summary.settle_time:.9g}",
                     str(summary.diverged).lower()))
        any_diverged |= summary.diverged
    with open(out_dir / "sweep.csv", "w", newline="\n") as fh:
        fh.write("value,rms,settle_time,diverged\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    print(f"swept {args.key} over {len(rows)} values; "
          f"{'some runs diverged' if any_diverged else 'all converged'}")
    return 2 if any_diverged else 0


def cmd_verify(args) -> int:
    if args.list_checks:
        for name, _ in verify_mod.CHECKS:
            print(name)
        return 0
    ok = verify_mod.run_checks(names=args.only)
    return 0 if ok else 3


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": cmd_run, "gains": cmd_gains,
                "sweep": cmd_sweep, "verify": cmd_verify}
    try:
        return handlers[args.cmd](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (BoomsimError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
