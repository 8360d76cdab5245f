"""Render trial and sweep figures from serialized run artifacts.

Inputs are the CSV/JSON files written by the simulator CLI; nothing here
links against the simulator itself. The trial figure stacks two panels:
measured normal force (with the setpoint reference line) above the
commanded normal/tangential velocities, with the approach/stabilize/sweep
phases shaded blue/green/orange in the paper style.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

TRACE_COLUMNS = (
    "t", "phase", "theta1", "d2", "x", "y",
    "f_n", "f_t", "v_n_cmd", "v_t_cmd", "k_eq", "k_f", "b",
)

PHASE_COLORS = {
    "paper": {"approach": "#4878cf", "stabilize": "#6acc65", "sweep": "#ee854a"},
    "plain": {"approach": "#cccccc", "stabilize": "#999999", "sweep": "#666666"},
}


class PlotvizError(Exception):
    pass


class MissingColumns(PlotvizError):
    def __init__(self, names):
        super().__init__(f"trace is missing required columns: {', '.join(names)}")
        self.names = tuple(names)


class EmptyInput(PlotvizError):
    pass


class MalformedRow(PlotvizError):
    def __init__(self, path, row):
        super().__init__(f"{path}: malformed row {row}")
        self.row = row


@dataclass(frozen=True)
class PlotRequest:
    trace_path: str | Path
    out_path: str | Path
    summary_path: str | Path | None = None
    style: str = "paper"

    def __post_init__(self):
        if self.style not in PHASE_COLORS:
            raise PlotvizError(f"unknown style {self.style!r}")


@dataclass(frozen=True)
class TrialFigureInfo:
    regions: tuple  # ((token, t_start, t_end), ...) in trace order
    f_des: float | None
    n_panels: int


def load_trace(path) -> dict[str, list]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyInput(f"{path}: empty file")
        missing = [c for c in TRACE_COLUMNS if c not in header]
        if missing:
            raise MissingColumns(missing)
        idx = {c: header.index(c) for c in TRACE_COLUMNS}
        cols: dict[str, list] = {c: [] for c in TRACE_COLUMNS}
        for n, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise MalformedRow(path, n)
            try:
                for c in TRACE_COLUMNS:
                    cols[c].append(row[idx[c]] if c == "phase"
                                   else float(row[idx[c]]))
            except ValueError:
                raise MalformedRow(path, n)
    if not cols["t"]:
        raise EmptyInput(f"{path}: no samples")
    return cols


def phase_regions(times, phases) -> tuple:
    """Contiguous phase runs; each region starts at its first trace row."""
    regions = []
    start = times[0]
    current = phases[0]
    for t, ph in zip(times[1:], phases[1:]):
        if ph != current:
            regions.append((current, start, t))
            current, start = ph, t
    regions.append((current, start, times[-1]))
    return tuple(regions)


def _read_f_des(summary_path) -> float | None:
    if summary_path is None:
        return None
    with open(summary_path) as fh:
        data = json.load(fh)
    value = data.get("f_des")
    if value is None:
        raise PlotvizError(f"{summary_path}: no f_des field")
    return float(value)


def build_trial_figure(request: PlotRequest):
    cols = load_trace(request.trace_path)
    f_des = _read_f_des(request.summary_path)
    regions = phase_regions(cols["t"], cols["phase"])
    colors = PHASE_COLORS[request.style]

    fig, (ax_f, ax_v) = plt.subplots(2, 1, sharex=True, figsize=(8, 5))
    for ax in (ax_f, ax_v):
        for token, t0, t1 in regions:
            ax.axvspan(t0, t1, color=colors.get(token, "#dddddd"), alpha=0.25,
                       linewidth=0)

    ax_f.plot(cols["t"], cols["f_n"], color="black", linewidth=0.9,
              label="measured normal force")
    if f_des is not None:
        ax_f.axhline(f_des, color="crimson", linestyle="--", linewidth=1.0,
                     label=f"setpoint {f_des:g} N")
        ax_f.legend(loc="lower right", fontsize=8)
    ax_f.set_ylabel("normal force (N)")

    ax_v.plot(cols["t"], cols["v_n_cmd"], color="black", linewidth=0.9,
              label="v_n command")
    ax_v.plot(cols["t"], cols["v_t_cmd"], color="dimgray", linewidth=0.9,
              linestyle=":", label="v_t command")
    ax_v.set_ylabel("commanded velocity (m/s)")
    ax_v.set_xlabel("time (s)")
    ax_v.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return fig, TrialFigureInfo(regions=regions, f_des=f_des, n_panels=2)


def plot_trial(request: PlotRequest) -> Path:
    fig, _ = build_trial_figure(request)
    out = Path(request.out_path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def load_sweep(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or \
                set(reader.fieldnames) != {"value", "rms", "settle_time", "diverged"}:
            raise PlotvizError(f"{path}: not a sweep file (header {reader.fieldnames})")
        rows = []
        for n, row in enumerate(reader, start=2):
            try:
                rows.append({
                    "value": float(row["value"]),
                    "rms": float(row["rms"]) if row["rms"] else None,
                    "settle_time": float(row["settle_time"]) if row["settle_time"] else None,
                    "diverged": row["diverged"].strip().lower() == "true",
                })
            except (TypeError, ValueError, AttributeError):
                raise MalformedRow(path, n)
    if not rows:
        raise EmptyInput(f"{path}: no sweep rows")
    return rows


def build_sweep_figure(sweep_csv):
    rows = load_sweep(sweep_csv)
    fig, (ax_rms, ax_st) = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
    ok = [r for r in rows if not r["diverged"]]
    bad = [r for r in rows if r["diverged"]]
    if ok:
        ax_rms.plot([r["value"] for r in ok],
                    [r["rms"] if r["rms"] is not None else float("nan") for r in ok],
                    "o-", color="black", label="rms force error")
        ax_st.plot([r["value"] for r in ok],
                   [r["settle_time"] if r["settle_time"] is not None else float("nan")
                    for r in ok],
                   "s-", color="dimgray", label="settle time")
    for r in bad:
        ax_rms.plot(r["value"], r["rms"] if r["rms"] is not None else 0.0,
                    "x", color="crimson", markersize=9, label="diverged")
    ax_rms.set_ylabel("rms force error (N)")
    ax_st.set_ylabel("settle time (s)")
    ax_st.set_xlabel("swept value")
    handles, labels = ax_rms.get_legend_handles_labels()
    if handles:
        seen = dict(zip(labels, handles))
        ax_rms.legend(seen.values(), seen.keys(), fontsize=8)
    fig.tight_layout()
    return fig, rows


def plot_sweep(sweep_csv, out_path) -> Path:
    fig, _ = build_sweep_figure(sweep_csv)
    out = Path(out_path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
