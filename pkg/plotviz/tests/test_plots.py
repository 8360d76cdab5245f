import math

import pytest

from plotviz import (
    EmptyInput,
    MalformedRow,
    MissingColumns,
    PlotRequest,
    build_sweep_figure,
    build_trial_figure,
    phase_regions,
    plot_sweep,
    plot_trial,
)

HEADER = "t,phase,theta1,d2,x,y,f_n,f_t,v_n_cmd,v_t_cmd,k_eq,k_f,b"


def write_trace(path, rows):
    lines = [HEADER]
    for t, phase, f_n in rows:
        lines.append(f"{t},{phase},1.0,0.5,0.25,0.43,{f_n},0,0.01,0.02,50,2,20")
    path.write_text("\n".join(lines) + "\n")


def three_phase_rows(n=300):
    rows = []
    for i in range(n):
        t = i * 0.002
        if i < n // 3:
            phase, f = "approach", 0.0
        elif i < 2 * n // 3:
            phase, f = "stabilize", -2.0 + math.exp(-10 * t)
        else:
            phase, f = "sweep", -2.0
        rows.append((t, phase, f))
    return rows


def test_trial_figure_three_ordered_regions(tmp_path):
    trace = tmp_path / "trace.csv"
    write_trace(trace, three_phase_rows())
    summary = tmp_path / "summary.json"
    summary.write_text('{"f_des": -2.0, "diverged": false}')
    out = tmp_path / "fig.png"
    fig, info = build_trial_figure(PlotRequest(trace, out, summary))
    assert info.n_panels == 2
    assert [r[0] for r in info.regions] == ["approach", "stabilize", "sweep"]
    starts = [r[1] for r in info.regions]
    assert starts == sorted(starts)
    assert info.f_des == -2.0
    # region boundaries sit on the first row of each phase token
    assert starts[1] == pytest.approx(0.002 * 100)
    assert starts[2] == pytest.approx(0.002 * 200)

    path = plot_trial(PlotRequest(trace, out, summary))
    assert path.exists() and path.stat().st_size > 1000


def test_trial_single_phase_ok(tmp_path):
    trace = tmp_path / "trace.csv"
    write_trace(trace, [(i * 0.002, "approach", 0.0) for i in range(50)])
    out = tmp_path / "fig.png"
    fig, info = build_trial_figure(PlotRequest(trace, out))
    assert len(info.regions) == 1
    assert info.f_des is None
    assert plot_trial(PlotRequest(trace, out)).exists()


def test_trial_missing_column_named(tmp_path):
    trace = tmp_path / "trace.csv"
    trace.write_text("t,phase,theta1\n0.0,approach,1.0\n")
    with pytest.raises(MissingColumns) as exc:
        build_trial_figure(PlotRequest(trace, tmp_path / "fig.png"))
    assert "f_n" in exc.value.names


def test_trial_empty_trace(tmp_path):
    trace = tmp_path / "trace.csv"
    trace.write_text(HEADER + "\n")
    with pytest.raises(EmptyInput):
        build_trial_figure(PlotRequest(trace, tmp_path / "fig.png"))


def test_phase_regions_boundaries():
    times = [0.0, 0.1, 0.2, 0.3, 0.4]
    phases = ["approach", "approach", "stabilize", "sweep", "sweep"]
    regions = phase_regions(times, phases)
    assert regions == (("approach", 0.0, 0.2), ("stabilize", 0.2, 0.3),
                       ("sweep", 0.3, 0.4))


def test_sweep_points_and_diverged_marker(tmp_path):
    sweep = tmp_path / "sweep.csv"
    lines = ["value,rms,settle_time,diverged"]
    for v in range(1, 11):
        lines.append(f"-{v},0.1{v},0.8,false")
    sweep.write_text("\n".join(lines) + "\n")
    fig, rows = build_sweep_figure(sweep)
    assert len(rows) == 10
    assert not any(r["diverged"] for r in rows)
    out = plot_sweep(sweep, tmp_path / "sweep.png")
    assert out.exists()

    lines[3] = "-3,,,true"  # diverged run: empty metrics
    sweep.write_text("\n".join(lines) + "\n")
    fig, rows = build_sweep_figure(sweep)
    assert sum(r["diverged"] for r in rows) == 1
    assert rows[2]["rms"] is None


def test_sweep_empty_errors_without_writing(tmp_path):
    sweep = tmp_path / "sweep.csv"
    sweep.write_text("value,rms,settle_time,diverged\n")
    out = tmp_path / "sweep.png"
    with pytest.raises(EmptyInput):
        plot_sweep(sweep, out)
    assert not out.exists()


def test_sweep_malformed_row_named(tmp_path):
    sweep = tmp_path / "sweep.csv"
    sweep.write_text("value,rms,settle_time,diverged\n-1,0.1,0.8,false\nnot-a-number,x,y,false\n")
    with pytest.raises(MalformedRow) as exc:
        build_sweep_figure(sweep)
    assert exc.value.row == 3


def test_cli_trial_and_sweep(tmp_path, capsys):
    from plotviz.cli import main
    trace = tmp_path / "trace.csv"
    write_trace(trace, three_phase_rows())
    out = tmp_path / "fig.png"
    assert main(["trial", str(trace), "-o", str(out)]) == 0
    assert out.exists()
    assert main(["trial", str(tmp_path / "missing.csv"), "-o", str(out)]) == 1
