import os

import numpy as np
import pytest

from relmc_plots import FigureSpec, plot_convergence, plot_ratio_table, plot_solution, read_csv
from relmc_plots.cli import main
from relmc_plots.figures import guide_line


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def snapshot_csv(tmp_path):
    return write_lines(tmp_path / "solution.csv", [
        "# seed = 0",
        "# t = 0.5",
        "x,u",
        "0,0",
        "0.5,1",
        "1,0",
    ])


@pytest.fixture
def report_csv(tmp_path):
    n = np.array([100, 1000, 10000])
    lines = ["# p = 2", "N,error_mc,error_mc_opt,error_gbmc,ratio"]
    for i, ni in enumerate(n):
        e = ni ** -0.5
        lines.append(f"{ni},{2 * e},{1.5 * e},{e},2.0")
    return write_lines(tmp_path / "report.csv", lines)


def test_read_csv_roundtrip(snapshot_csv):
    columns, meta = read_csv(snapshot_csv)
    np.testing.assert_allclose(columns["x"], [0.0, 0.5, 1.0])
    np.testing.assert_allclose(columns["u"], [0.0, 1.0, 0.0])
    assert meta["seed"] == "0" and meta["t"] == "0.5"


def test_read_csv_rejects_bad_rows(tmp_path):
    bad = write_lines(tmp_path / "bad.csv", ["x,u", "1,two"])
    with pytest.raises(ValueError):
        read_csv(bad)
    empty = write_lines(tmp_path / "empty.csv", ["# only = metadata"])
    with pytest.raises(ValueError):
        read_csv(empty)


def test_minimal_solution_renders(snapshot_csv, tmp_path):
    out = plot_solution(FigureSpec(input=snapshot_csv,
                                   output=str(tmp_path / "fig.png")))
    assert os.path.getsize(out) > 0


def test_solution_with_inset_and_reference(snapshot_csv, tmp_path):
    ref = write_lines(tmp_path / "ref.csv", ["x,u", "0,0", "1,0.5"])
    out = plot_solution(FigureSpec(
        input=snapshot_csv, output=str(tmp_path / "fig2.png"),
        reference=ref, initial=snapshot_csv, inset=True))
    assert os.path.getsize(out) > 0


def test_missing_reference_warns_but_renders(snapshot_csv, tmp_path):
    spec = FigureSpec(input=snapshot_csv, output=str(tmp_path / "fig3.png"),
                      reference=str(tmp_path / "nope.csv"))
    with pytest.warns(UserWarning, match="overlay omitted"):
        out = plot_solution(spec)
    assert os.path.getsize(out) > 0


def test_solution_schema_mismatch(tmp_path):
    bad = write_lines(tmp_path / "bad.csv", ["y,u", "0,0", "1,1"])
    with pytest.raises(ValueError):
        plot_solution(FigureSpec(input=bad, output=str(tmp_path / "f.png")))


def test_convergence_three_methods(report_csv, tmp_path):
    out = plot_convergence(FigureSpec(input=report_csv, kind="convergence",
                                      output=str(tmp_path / "conv.png")))
    assert os.path.getsize(out) > 0


def test_convergence_requires_error_columns(tmp_path):
    bad = write_lines(tmp_path / "r.csv", ["N,foo", "100,1"])
    with pytest.raises(ValueError):
        plot_convergence(FigureSpec(input=bad, kind="convergence",
                                    output=str(tmp_path / "c.png")))


def test_guide_line_parallel_to_sqrt_law():
    ns = np.array([1e2, 1e3, 1e4])
    errs = 0.3 * ns ** -0.5
    guide = guide_line(ns, ns[0], errs[0], -0.5)
    np.testing.assert_allclose(guide, errs, rtol=1e-12)
    # log-log slope of the guide matches the exponent
    slope = np.polyfit(np.log(ns), np.log(guide), 1)[0]
    assert slope == pytest.approx(-0.5)


def test_ratio_table(report_csv, tmp_path):
    out = plot_ratio_table(FigureSpec(input=report_csv, kind="ratio-table",
                                      output=str(tmp_path / "tab.png")))
    assert os.path.getsize(out) > 0


def test_spec_rejects_unknown_kind(snapshot_csv, tmp_path):
    with pytest.raises(ValueError):
        FigureSpec(input=snapshot_csv, output=str(tmp_path / "x.png"),
                   kind="pie")


def test_cli_solution_and_exit_codes(snapshot_csv, tmp_path, capsys):
    out = str(tmp_path / "cli.png")
    assert main(["solution-overlay", snapshot_csv, "-o", out]) == 0
    assert os.path.getsize(out) > 0
    assert main(["solution-overlay", str(tmp_path / "nope.csv"),
                 "-o", out]) == 2
    bad = write_lines(tmp_path / "bad.csv", ["y,u", "0,0"])
    assert main(["solution-overlay", bad, "-o", out]) == 2
    capsys.readouterr()
