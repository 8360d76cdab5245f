"""Acceptance: the trial figure built from a real simulator run has two
panels, three ordered phase shadings, and the setpoint reference line.

The run artifacts are produced through the simulator's public CLI
(subprocess); the test is skipped when that CLI is not installed, keeping
this package buildable on its own.
"""

import shutil
import subprocess

import pytest

from plotviz import PlotRequest, build_trial_figure, plot_trial

pytestmark = pytest.mark.skipif(shutil.which("boomsim") is None,
                                reason="simulator CLI not installed")


@pytest.fixture(scope="module")
def run_artifacts(tmp_path_factory):
    out = tmp_path_factory.mktemp("replica")
    proc = subprocess.run(
        ["boomsim", "run", "--config", "configs/paper_replica.json",
         "--out-dir", str(out)],
        capture_output=True, text=True, cwd=str(__import__("pathlib").Path(
            __file__).resolve().parents[2]),
    )
    assert proc.returncode == 0, proc.stderr
    return out


def test_trial_figure_reproduces_experiment_structure(run_artifacts, tmp_path):
    request = PlotRequest(trace_path=run_artifacts / "trace.csv",
                          out_path=tmp_path / "trial.png",
                          summary_path=run_artifacts / "summary.json",
                          style="paper")
    fig, info = build_trial_figure(request)
    assert info.n_panels == 2
    assert [r[0] for r in info.regions] == ["approach", "stabilize", "sweep"]
    starts = [r[1] for r in info.regions]
    assert starts == sorted(starts)
    assert info.f_des == -2.0

    path = plot_trial(request)
    assert path.exists() and path.stat().st_size > 10_000
    print(f"\nACCEPTANCE 9: PASS — two-panel figure with ordered "
          f"blue/green/orange phase shading at t = {starts} and an f_des "
          f"reference line at {info.f_des} N")
