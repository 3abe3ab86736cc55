import csv
import json
import subprocess
import sys

import pytest

from euler_alignment import cli
from euler_alignment import lagrangian as L

SMALL_RUN = {
    "kernel": {"kind": "power_law", "alpha": 0.5},
    "data": {"preset": "sine_velocity", "amplitude": 0.1},
    "solver": {"N": 64, "n": 32, "t_end": 0.5, "dt": 0.05, "order": 2},
    "campaign": {"ladder": [[64, 0.01], [128, 0.01]], "t_end": 1.0},
}


def write(tmp_path, obj, name="run.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_bound_headline(capsys):
    assert cli.main(["bound", "--alpha", "0.5", "--mass", "1", "--c0", "1"]) == 0
    out = capsys.readouterr().out
    lines = dict(l.split("=", 1) for l in out.splitlines())
    assert float(lines["beta         "]) == 16.0
    assert float(lines["k_star       "]) == 8.0
    assert float(lines["k0           "]) == 4.0


def test_bound_csv_and_config(tmp_path, capsys):
    path = tmp_path / "b.csv"
    assert cli.main(["bound", "--config", "preset1", "--csv", str(path)]) == 0
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert tuple(rows[0].keys()) == cli.BOUND_CSV_COLUMNS
    assert rows[0]["regime"] == "OptimizedAnalytic"
    assert cli.main(["bound", "--sup-norm", "2", "--mass", "3", "--c0", "0.5"]) == 0
    assert "BoundedKernel" in capsys.readouterr().out


def test_usage_errors(capsys):
    assert cli.main([]) == 2
    assert "usage" in capsys.readouterr().err
    assert cli.main(["frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err
    assert cli.main(["bound", "--alpha", "0.5"]) == 2
    assert cli.main(["bound", "--alpha", "1.5", "--mass", "1", "--c0", "1"]) == 2


def test_invalid_config_lists_errors(tmp_path, capsys):
    bad = write(tmp_path, {"kernel": {"kind": "power_law", "alpha": 1.2}, "data": {"preset": "flat"},
                           "solver": {"N": 63}})
    assert cli.main(["simulate", "--config", bad]) == 2
    err = capsys.readouterr().err
    assert "(0,1)" in err and "solver.N" in err


def test_simulate_eulerian(tmp_path):
    cfg = dict(SMALL_RUN, output={"diagnostics_csv": str(tmp_path / "d.csv"),
                                  "snapshots_csv": str(tmp_path / "s.csv"), "snapshot_times": [0.0, 0.5]})
    assert cli.main(["simulate", "--config", write(tmp_path, cfg)]) == 0
    with open(tmp_path / "d.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "rho_inf", "G_inf", "G_min", "ratio_min", "mass_drift", "momentum_drift"]
    assert float(rows[-1][0]) == 0.5
    with open(tmp_path / "s.csv") as fh:
        assert len(list(csv.reader(fh))) == 1 + 2 * 64


def test_simulate_lagrangian_to_stdout(tmp_path, capsys):
    traj = tmp_path / "t.csv"
    assert cli.main(["simulate", "--config", write(tmp_path, SMALL_RUN), "--scheme", "lagrangian",
                     "--trajectory", str(traj)]) == 0
    out = capsys.readouterr()
    assert out.out.splitlines()[0] == ",".join(L.LAGRANGIAN_COLUMNS)
    assert json.loads(out.err)["outcome"] == "CompletedGlobal"
    with open(traj) as fh:
        assert len(next(csv.reader(fh))) == 1 + 4 * 32


def test_simulate_is_deterministic(tmp_path):
    outs = []
    for i in range(2):
        cfg = dict(SMALL_RUN, output={"diagnostics_csv": str(tmp_path / f"d{i}.csv")})
        cli.main(["simulate", "--config", write(tmp_path, cfg, f"r{i}.json")])
        outs.append((tmp_path / f"d{i}.csv").read_bytes())
    assert outs[0] == outs[1]


def test_verify_pass_and_fail(tmp_path, capsys):
    report = tmp_path / "rep.json"
    assert cli.main(["verify", "--scenario", "subcritical", "--config", write(tmp_path, SMALL_RUN),
                     "--report", str(report)]) == 0
    assert json.loads(report.read_text())["passed"] is True
    failing = dict(SMALL_RUN, campaign=dict(SMALL_RUN["campaign"], tolerances={"rho": -0.99}))
    assert cli.main(["verify", "--scenario", "subcritical", "--config", write(tmp_path, failing, "f.json")]) == 1
    assert "FAIL" in capsys.readouterr().out
    # subcritical data under a supercritical scenario is a configuration error
    assert cli.main(["verify", "--scenario", "supercritical", "--config", write(tmp_path, SMALL_RUN)]) == 2
    assert cli.main(["verify", "--scenario", "nonsense"]) == 2


def test_numerical_abort_exit_code(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise L.NumericalAbort("step size fell below dt_min")
    monkeypatch.setattr(L, "integrate", boom)
    assert cli.main(["simulate", "--config", write(tmp_path, SMALL_RUN), "--scheme", "lagrangian"]) == 3


def test_sweep_and_compare(tmp_path, capsys):
    out = tmp_path / "sw.csv"
    assert cli.main(["sweep", "--alpha", "0.5", "--mass", "1,2", "--c0", "1,4", "--csv", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4 and float(rows[0]["beta"]) == 16.0
    assert cli.main(["sweep", "--c0", "1"]) == 2
    assert cli.main(["compare", "--config", write(tmp_path, SMALL_RUN), "--ladder", "64:0.01,128:0.01"]) == 0
    assert "[PASS] refinement" in capsys.readouterr().out


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "euler_alignment.cli", "bound", "--alpha", "0.5", "--mass", "1",
                           "--c0", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "beta         = 16\n" in proc.stdout
