"""Round trip through the solver CLI.

These tests drive the solver as an external command, so they are skipped
when it is not installed; the rest of the suite runs on synthetic CSVs.
"""

import glob
import os
import shutil
import subprocess

import pytest

from relmc_plots import FigureSpec, plot_convergence, plot_solution

needs_solver = pytest.mark.skipif(shutil.which("relmc") is None,
                                  reason="solver CLI not installed")


@needs_solver
def test_square_wave_artifacts_render(tmp_path):
    run_dir = tmp_path / "run"
    subprocess.run(["relmc", "run", "--preset", "test1b", "--seed", "0",
                    "--out", str(run_dir)], check=True, capture_output=True)
    snapshots = sorted(glob.glob(str(run_dir / "*_solution.csv")))
    assert snapshots
    out = plot_solution(FigureSpec(
        input=snapshots[-1], output=str(tmp_path / "shock.png"),
        initial=snapshots[0] if len(snapshots) > 1 else None, inset=True))
    assert os.path.getsize(out) > 0


@needs_solver
def test_convergence_report_renders(tmp_path):
    cfg = tmp_path / "study.yaml"
    cfg.write_text(
        "preset: test1a\n"
        "ns: [100, 300]\n"
        "runs: 2\n"
        "a: 0.5\n"
        "dt: 0.05\n"
        "t_final: 0.5\n"
        "m_ref: 500\n"
        f"output_dir: {tmp_path / 'study'}\n")
    subprocess.run(["relmc", "converge", str(cfg)], check=True,
                   capture_output=True)
    report = glob.glob(str(tmp_path / "study" / "*_report.csv"))
    assert len(report) == 1
    out = plot_convergence(FigureSpec(
        input=report[0], kind="convergence",
        output=str(tmp_path / "conv.png")))
    assert os.path.getsize(out) > 0
