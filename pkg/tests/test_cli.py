"""End-to-end command-line behavior: parsing, outputs, and exit codes."""

from __future__ import annotations

import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from lyapdim import (
    AxisSpec,
    ScanRequest,
    SystemParams,
    absorbing_ball,
    equilibria,
    leonov_formula,
    run_scan,
)
from lyapdim.cli import main, parse_params, resolve_seed
from lyapdim.scan import cells_to_csv_text, cells_to_json

CLASSICAL = "10,28,8/3"


def run_cli(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse error path
        code = exc.code
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


# -------------------------------------------------------------------- parsing


def test_parse_params_accepts_rationals():
    p = parse_params(" 10 , 28 , 8/3 ")
    assert (p.sigma, p.r, p.b) == (10.0, 28.0, 8.0 / 3.0)
    with pytest.raises(ValueError):
        parse_params("10,28")
    with pytest.raises(ValueError):
        parse_params("10,28,abc")


def test_resolve_seed_names_and_triples(classical):
    assert np.array_equal(resolve_seed(classical, "s0"), np.zeros(3))
    off = resolve_seed(classical, "s0", offset=1e-3)
    assert np.allclose(off, 1e-3 / math.sqrt(3.0))
    eqs = equilibria(classical)
    assert np.array_equal(resolve_seed(classical, "s1"), eqs.s12[0])
    assert np.array_equal(resolve_seed(classical, "S2"), eqs.s12[1])
    assert np.array_equal(resolve_seed(classical, "1,2,3"), [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        resolve_seed(SystemParams(10.0, 0.5, 8.0 / 3.0), "s1")
    with pytest.raises(ValueError):
        resolve_seed(classical, "1,2")


# ------------------------------------------------------------------- simulate


def test_simulate_from_origin_stays_in_the_ball(classical, capsys):
    code, out, err = run_cli(
        capsys, "simulate", "--params", CLASSICAL, "--from", "s0",
        "--horizon", "100", "--samples", "200",
    )
    assert code == 0 and err == ""
    header, rows = read_csv(out)
    assert header == ["t", "x", "y", "z"]
    assert len(rows) == 200
    center, radius = absorbing_ball(classical)
    pts = np.array([[float(v) for v in row[1:]] for row in rows])
    assert (np.linalg.norm(pts - center, axis=1) <= radius).all()
    times = np.array([float(r[0]) for r in rows])
    assert (np.diff(times) > 0).all()
    assert times[-1] == pytest.approx(100.0, abs=1e-9)


def test_simulate_stable_regime_lands_on_origin(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--params", "10,0.5,8/3", "--from", "1,1,1",
        "--horizon", "100", "--samples", "50",
    )
    assert code == 0
    _, rows = read_csv(out)
    end = np.array([float(v) for v in rows[-1][1:]])
    assert np.linalg.norm(end) < 1e-6


def test_simulate_separatrix_seed_reaches_the_positive_wing(capsys):
    p = SystemParams(10.0, 24.5, 8.0 / 3.0)
    code, out, _ = run_cli(
        capsys, "simulate", "--params", "10,24.5,8/3",
        "--from=-16.2899,-0.0601,42.1214", "--horizon", "1100", "--samples", "100",
    )
    assert code == 0
    _, rows = read_csv(out)
    end = np.array([float(v) for v in rows[-1][1:]])
    s2 = equilibria(p).s12[1]
    assert np.linalg.norm(end - s2) < 1e-3


def test_simulate_split_transient_labels_segments(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--params", CLASSICAL, "--from", "1,1,1",
        "--transient", "5", "--horizon", "5", "--split-transient",
        "--samples", "40",
    )
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["t", "x", "y", "z", "segment"]
    segs = [r[4] for r in rows]
    assert "transient" in segs and "attractor" in segs
    # every transient row precedes every attractor row
    assert segs.index("attractor") == segs.count("transient")
    assert "transient" not in segs[segs.index("attractor"):]
    times = [float(r[0]) for r in rows]
    assert times == sorted(times)


def test_simulate_survives_a_closed_stdout_pipe():
    # enough rows to overrun the pipe buffer, so the writer sees EPIPE
    proc = subprocess.Popen(
        [sys.executable, "-m", "lyapdim", "simulate", "--params", CLASSICAL,
         "--from", "1,1,1", "--horizon", "50", "--samples", "5000",
         "--output", "csv"],
        stdout=subprocess.PIPE, stderr=subprocess.PIPE,
    )
    proc.stdout.read(64)
    proc.stdout.close()
    err = proc.stderr.read()
    proc.stderr.close()
    assert proc.wait() == 0
    assert err == b""


def test_simulate_json_records(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--params", CLASSICAL, "--from", "1,1,1",
        "--horizon", "2", "--samples", "10", "--output", "json",
    )
    assert code == 0
    recs = json.loads(out)
    assert len(recs) == 10
    assert set(recs[0]) == {"t", "x", "y", "z"}


def test_simulate_accepts_adaptive_method(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--params", CLASSICAL, "--from", "1,1,1",
        "--horizon", "1", "--samples", "5", "--method", "DOPRI45",
    )
    assert code == 0
    _, rows = read_csv(out)
    assert len(rows) == 5


# ------------------------------------------------------------------ les / dim


def test_les_json_report(capsys):
    code, out, _ = run_cli(
        capsys, "les", "--params", CLASSICAL, "--from", "1,1,1.001",
        "--horizon", "200", "--transient", "100",
    )
    assert code == 0
    rec = json.loads(out)
    assert rec["horizon"] == pytest.approx(200.0)
    assert rec["transient"] == 100.0
    e = rec["exponents"]
    assert e[0] >= e[1] >= e[2]
    assert abs(e[0] - 0.906) < 0.1 and abs(e[2] + 14.572) < 0.1
    assert rec["trace"] == pytest.approx(-(41.0 / 3.0))
    assert rec["sum"] == pytest.approx(sum(e), rel=1e-12)
    assert rec["residual"] == pytest.approx(abs(rec["sum"] - rec["trace"]), rel=1e-12)
    assert rec["residual"] < 1e-3


def test_les_csv_report(capsys):
    code, out, _ = run_cli(
        capsys, "les", "--params", "10,0.5,8/3", "--from", "1,1,1",
        "--horizon", "60", "--transient", "0", "--output", "csv",
    )
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["le1", "le2", "le3", "horizon", "transient", "sum", "trace",
                      "residual"]
    assert len(rows) == 1
    vals = [float(v) for v in rows[0]]
    assert vals[0] >= vals[1] >= vals[2]
    assert vals[3] == pytest.approx(60.0)


def test_les_adaptive_method_smoke(capsys):
    code, out, _ = run_cli(
        capsys, "les", "--params", "10,0.5,8/3", "--from", "1,1,1",
        "--horizon", "60", "--transient", "0", "--method", "DOPRI45",
    )
    assert code == 0
    rec = json.loads(out)
    assert rec["exponents"][0] < 0.0


def test_dim_at_origin_matches_the_formula(classical, capsys):
    code, out, _ = run_cli(
        capsys, "dim", "--params", CLASSICAL, "--from", "s0", "--horizon", "1000",
    )
    assert code == 0
    rec = json.loads(out)
    assert abs(rec["dimension"] - 2.401312763583084) < 1e-4
    assert rec["j"] == 2
    assert rec["dimension"] == pytest.approx(rec["j"] + rec["fraction"], rel=1e-12)
    assert rec["sup_checkpoints"] >= rec["dimension"]
    assert rec["degenerate"] is False
    assert abs(rec["dimension"] - leonov_formula(classical)) < 1e-4


def test_dim_on_the_attractor(capsys):
    code, out, _ = run_cli(
        capsys, "dim", "--params", CLASSICAL, "--from", "1,1,1",
        "--horizon", "1000", "--transient", "100",
    )
    assert code == 0
    rec = json.loads(out)
    assert abs(rec["dimension"] - 2.062) < 0.01
    assert rec["residual"] < 5e-3
    assert rec["sup_checkpoints"] >= rec["dimension"]


def test_dim_stable_regime_is_zero(capsys):
    code, out, _ = run_cli(
        capsys, "dim", "--params", "10,0.5,8/3", "--from", "1,1,1",
    )
    assert code == 0
    rec = json.loads(out)
    assert rec["dimension"] == 0.0 and rec["j"] == 0


def test_dim_csv_variant(capsys):
    code, out, _ = run_cli(
        capsys, "dim", "--params", "10,0.5,8/3", "--from", "1,1,1",
        "--output", "csv",
    )
    assert code == 0
    header, rows = read_csv(out)
    assert "dimension" in header and len(rows) == 1
    rec = dict(zip(header, rows[0]))
    assert float(rec["dimension"]) == 0.0


# ---------------------------------------------------------------------- check


def test_check_classical_json(classical, capsys):
    code, out, _ = run_cli(capsys, "check", "--params", CLASSICAL)
    assert code == 0
    rec = json.loads(out)
    assert rec["outcome"] == "FormulaHolds"
    assert rec["branch"] == "CaseA"
    assert rec["bound"] == pytest.approx(leonov_formula(classical), rel=1e-15)
    assert "(13)" in rec["satisfied"]
    ids = [c["id"] for c in rec["conditions"]]
    assert ids == ["(7)", "(8)", "(9)", "(12)", "(13)"]


def test_check_convergence_and_fail_outcomes(capsys):
    code, out, _ = run_cli(capsys, "check", "--params", "10,3,8/3")
    rec = json.loads(out)
    assert code == 0 and rec["outcome"] == "ConvergesToEquilibria"
    assert rec["bound"] is None
    code, out, _ = run_cli(capsys, "check", "--params", "10,0.5,8/3")
    rec = json.loads(out)
    assert code == 0 and rec["outcome"] == "ConditionsFail"
    assert "(7)" in rec["failed"]


def test_check_csv_variant(capsys):
    code, out, _ = run_cli(capsys, "check", "--params", CLASSICAL, "--output", "csv")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["id", "holds", "detail"]
    byid = {r[0]: r for r in rows}
    assert byid["(13)"][1] == "true"
    assert byid["outcome"][2] == "FormulaHolds"
    assert float(byid["bound"][2]) == pytest.approx(2.401312763583084, abs=1e-12)


# -------------------------------------------------------------------- certify


def test_certify_classical(capsys):
    code, out, _ = run_cli(
        capsys, "certify", "--params", CLASSICAL, "--samples", "4096",
    )
    assert code == 0
    rec = json.loads(out)
    assert rec["passed"] is True
    assert rec["max_R"] <= 1e-9
    assert rec["n_samples"] == 4096
    for key in ("gamma1", "gamma2", "gamma3", "gamma4", "rho", "s0"):
        assert key in rec
    assert rec["bound"] == pytest.approx(2.401312763583084, abs=1e-12)
    assert all(c["holds"] for c in rec["checks"])


def test_certify_reports_failure_with_exit_three(capsys):
    code, out, err = run_cli(
        capsys, "certify", "--params", "10,0.5,8/3", "--samples", "1024",
    )
    assert code == 3
    assert out == ""
    assert "no certificate" in err and "(7)" in err


def test_certify_csv_variant(capsys):
    code, out, _ = run_cli(
        capsys, "certify", "--params", CLASSICAL, "--samples", "1024",
        "--output", "csv",
    )
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["field", "value"]
    fields = {r[0]: r[1] for r in rows}
    assert fields["passed"] == "true"
    assert float(fields["gamma1"]) == pytest.approx(0.0018194266329686043, abs=1e-15)


# ----------------------------------------------------------------- equilibria


def test_equilibria_subcommand_json(classical, capsys):
    code, out, _ = run_cli(capsys, "equilibria", "--params", CLASSICAL)
    assert code == 0
    rec = json.loads(out)
    w = math.sqrt((8.0 / 3.0) * 27.0)
    assert rec["s0"] == [0.0, 0.0, 0.0]
    assert rec["s1"] == pytest.approx([-w, -w, 27.0])
    assert rec["s2"] == pytest.approx([w, w, 27.0])
    code, out, _ = run_cli(capsys, "equilibria", "--params", "10,0.5,8/3")
    rec = json.loads(out)
    assert code == 0 and rec["s1"] is None and rec["s2"] is None


def test_equilibria_subcommand_csv(capsys):
    code, out, _ = run_cli(
        capsys, "equilibria", "--params", CLASSICAL, "--output", "csv"
    )
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["name", "x", "y", "z"]
    assert [r[0] for r in rows] == ["s0", "s1", "s2"]
    assert float(rows[1][1]) < 0.0 < float(rows[2][1])


# ----------------------------------------------------------------------- scan


def test_scan_cli_matches_library(capsys):
    code, out, _ = run_cli(
        capsys, "scan", "--fixed", "sigma=10", "--axis1", "r:1.5:50:10",
        "--axis2", "b:0.5:4:10",
    )
    assert code == 0
    req = ScanRequest(
        "sigma", 10.0, AxisSpec("r", 1.5, 50.0, 10), AxisSpec("b", 0.5, 4.0, 10)
    )
    assert out == cells_to_csv_text(run_scan(req))


def test_scan_cli_json(capsys):
    code, out, _ = run_cli(
        capsys, "scan", "--fixed", "b=8/3", "--axis1", "sigma:5:15:3",
        "--axis2", "r:2:40:3", "--output", "json",
    )
    assert code == 0
    req = ScanRequest(
        "b", 8.0 / 3.0, AxisSpec("sigma", 5.0, 15.0, 3), AxisSpec("r", 2.0, 40.0, 3)
    )
    assert out == cells_to_json(run_scan(req)) + "\n"


def test_scan_cli_threads_flag_and_env(capsys, monkeypatch):
    args = ("scan", "--fixed", "sigma=10", "--axis1", "r:1.5:50:4",
            "--axis2", "b:0.5:4:4")
    _, serial, _ = run_cli(capsys, *args)
    code, threaded, _ = run_cli(capsys, *args, "--threads", "3")
    assert code == 0 and threaded == serial
    monkeypatch.setenv("LYAPDIM_THREADS", "2")
    code, enved, _ = run_cli(capsys, *args)
    assert code == 0 and enved == serial
    monkeypatch.setenv("LYAPDIM_THREADS", "0")
    code, _, err = run_cli(capsys, *args)
    assert code == 1 and "threads" in err


def test_scan_cli_rejects_bad_fixed(capsys):
    code, _, err = run_cli(
        capsys, "scan", "--fixed", "sigma:10", "--axis1", "r:1:5:2",
        "--axis2", "b:1:4:2",
    )
    assert code == 1 and "NAME=VALUE" in err


# ------------------------------------------------------------ files and errors


def test_out_flag_writes_identical_bytes(tmp_path, capsys):
    args = ("check", "--params", CLASSICAL)
    _, stdout_text, _ = run_cli(capsys, *args)
    target = tmp_path / "verdict.json"
    code, out, _ = run_cli(capsys, *args, "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text() == stdout_text


def test_unwritable_out_path_is_config_error(tmp_path, capsys):
    code, _, err = run_cli(
        capsys, "check", "--params", CLASSICAL,
        "--out", str(tmp_path / "missing" / "x.json"),
    )
    assert code == 1 and "error" in err


def test_divergent_seed_exits_two(capsys):
    code, out, err = run_cli(
        capsys, "les", "--params", CLASSICAL, "--from", "1e9,0,0",
        "--horizon", "60", "--transient", "1",
    )
    assert code == 2
    assert "diverged" in err


def test_bad_parameter_count_exits_one(capsys):
    code, _, err = run_cli(capsys, "check", "--params", "10,28")
    assert code == 1 and "error" in err


def test_nonpositive_parameter_exits_one(capsys):
    code, _, err = run_cli(capsys, "check", "--params", "10,-28,8/3")
    assert code == 1


def test_seed_name_unavailable_exits_one(capsys):
    code, _, err = run_cli(
        capsys, "simulate", "--params", "10,0.5,8/3", "--from", "s1",
        "--horizon", "1", "--samples", "2",
    )
    assert code == 1 and "requires r > 1" in err


def test_unknown_flag_exits_one(capsys):
    code, _, err = run_cli(capsys, "les", "--bogus")
    assert code == 1


def test_unknown_subcommand_exits_one(capsys):
    code, _, _ = run_cli(capsys, "transmogrify")
    assert code == 1


def test_missing_subcommand_exits_one(capsys):
    code, _, _ = run_cli(capsys)
    assert code == 1


def test_short_horizon_for_les_is_config_error(capsys):
    code, _, err = run_cli(
        capsys, "les", "--params", CLASSICAL, "--from", "1,1,1", "--horizon", "10",
    )
    assert code == 1 and "horizon" in err.lower()
