import csv
import io
import json
import math

import pytest

from hermtrig import cli
from hermtrig.cli import SweepConfig, algebra_report, contraction_study, main, run_sweep
from hermtrig.scalars import SpaceLabels, all_normalized_labels
from hermtrig.triangle import solve, symplectic_area, to_record

ALL = all_normalized_labels()
CONTRACTIONS = [(L, which) for which in ("eta", "kappa1", "kappa2") for L in ALL if getattr(L, which) != 0]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --- solve -------------------------------------------------------------------


def test_solve_pythagoras(capsys):
    code, out, _ = run(capsys, "solve", "--labels", "1,1,1", "--a", "0.5", "--b", "0.5", "--C", "1.5707963", "--json")
    assert code == 0
    rec = json.loads(out)
    expected = math.acos(math.cos(0.5) ** 2)
    assert abs(rec["c"]) == pytest.approx(expected, abs=1e-7)
    assert rec["residual"] <= 1e-9


def test_solve_all_zero_flags(capsys):
    code, out, _ = run(capsys, "solve", "--labels", "1,1,1", "--json")
    rec = json.loads(out)
    assert code == 0
    assert rec["residual"] == 0
    assert all(rec[k] == 0 for k in ("a", "b", "c", "A", "B", "C", "omega", "Omega"))


def test_solve_flat_labels(capsys):
    code, out, _ = run(capsys, "solve", "--labels", "1,0,1", "--a", "0.6", "--b", "0.8", "--C", "1.2", "--psi_C", "0.3", "--json")
    rec = json.loads(out)
    assert code == 0
    assert rec["omega"] == pytest.approx(0.0, abs=1e-12)
    assert rec["S"] != 0


def test_solve_table_output(capsys):
    code, out, _ = run(capsys, "solve", "--labels", "1,1,1", "--a", "0.5", "--b", "0.4", "--C", "1.0")
    assert code == 0
    assert out.splitlines()[0].split() == ["field", "value"]


def test_solve_exit_codes(capsys):
    assert run(capsys, "solve", "--labels", "1,1,1", "--C", "1.0")[0] == cli.EXIT_DEGENERATE
    code, _, err = run(capsys, "solve", "--labels", "1,1,-1", "--a", "0.7", "--b", "0.5", "--C", "1.1", "--psi_C", "0.3")
    assert code == cli.EXIT_NO_REAL and err
    assert run(capsys, "solve", "--labels", "1,1")[0] == cli.EXIT_INPUT
    assert run(capsys, "solve")[0] == cli.EXIT_INPUT


# --- verify ------------------------------------------------------------------


@pytest.fixture
def record_file(tmp_path):
    def write(rec):
        path = tmp_path / "record.json"
        path.write_text(json.dumps(rec) if isinstance(rec, dict) else rec)
        return str(path)

    return write


def test_verify_good_record(capsys, record_file):
    rec = to_record(solve(0.7, None, 0.4, None, 1.2, 0.3, SpaceLabels(1, 1, 1)))
    code, out, _ = run(capsys, "verify", record_file(rec), "--json")
    assert code == 0
    assert json.loads(out)["pass"] is True


def test_verify_perturbed_omega(capsys, record_file):
    rec = to_record(solve(0.7, None, 0.4, None, 1.2, 0.3, SpaceLabels(1, 1, 1)))
    rec["omega"] += 0.01
    code, out, err = run(capsys, "verify", record_file(rec), "--json")
    assert code == cli.EXIT_FAIL
    entries = json.loads(out)["entries"]
    assert not entries["omega_def"]["pass"]
    assert "failed" in err


def test_verify_unreadable(capsys, record_file, tmp_path):
    assert run(capsys, "verify", record_file(""))[0] == cli.EXIT_INPUT
    assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == cli.EXIT_INPUT


# --- sweep -------------------------------------------------------------------


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(count=0)
    with pytest.raises(ValueError):
        SweepConfig(tolerance=0.0)
    assert SweepConfig(seed=3).task_seeds() == SweepConfig(seed=3).task_seeds()
    assert SweepConfig(seed=3).task_seeds() != SweepConfig(seed=4).task_seeds()


def test_sweep_csv_is_deterministic(capsys):
    argv = ["sweep", "--labels=-1,-1,-1", "--labels=0,1,0", "--count", "20", "--seed", "7", "--csv"]
    code, first, _ = run(capsys, *argv)
    assert code == 0
    _, second, _ = run(capsys, *argv)
    _, parallel, _ = run(capsys, *argv, "--workers", "2")
    assert first == second == parallel
    rows = list(csv.DictReader(io.StringIO(first)))
    assert list(rows[0]) == cli.SWEEP_COLUMNS
    assert {r["labels"] for r in rows} == {str(SpaceLabels(-1, -1, -1)), str(SpaceLabels(0, 1, 0))}
    assert all(int(r["fail-count"]) == 0 and int(r["pass-count"]) >= 1 for r in rows)


def test_sweep_de_sitter_rows():
    rows = run_sweep(SweepConfig((SpaceLabels(-1, -1, -1),), count=30, seed=1))
    ids = {r["law-id"] for r in rows}
    for law in ("t1i[1]", "t1I[2]", "sr_cos[3]", "bt_dualcos[1]", "gramm_Gamma[1]", "loop_line[2]"):
        assert law in ids
    assert max(r["max-residual"] for r in rows) <= 1e-8


def test_sweep_summary_and_failure(capsys):
    code, out, _ = run(capsys, "sweep", "--labels", "1,1,1", "--count", "5")
    assert code == 0
    assert out.splitlines()[0].split() == ["labels", "laws", "failing", "worst"]
    code, _, err = run(capsys, "sweep", "--labels", "1,1,1", "--count", "5", "--tol", "1e-30")
    assert code == cli.EXIT_FAIL and "failing" in err
    assert run(capsys, "sweep", "--labels", "1,1,1", "--count", "0")[0] == cli.EXIT_INPUT


def test_ckd_tol(monkeypatch, capsys):
    monkeypatch.setenv("CKD_TOL", "1e-6")
    assert cli.default_tol() == 1e-6
    monkeypatch.setenv("CKD_TOL", "-1")
    with pytest.raises(ValueError):
        cli.default_tol()
    assert run(capsys, "solve", "--labels", "1,1,1")[0] == cli.EXIT_INPUT


# --- contract ----------------------------------------------------------------


@pytest.mark.parametrize("labels, which", CONTRACTIONS, ids=lambda v: str(v))
def test_contraction_converges(labels, which):
    study = contraction_study(labels, which)
    assert len(study.rows) == 16
    for row in study.rows:
        assert row.order >= 0.99, (row.invariant, row.deviations)
        assert row.extrapolated_error <= 1e-6, row.invariant


def test_contraction_area_limit():
    base = SpaceLabels(1, 1, 1)
    study = contraction_study(base, "kappa1")
    a, b, C, psi_C = study.inputs
    flat = symplectic_area(solve(a, None, b, None, C, psi_C, SpaceLabels(1, 0, 1)))
    for eps in cli.DEFAULT_EPSILONS:
        t = solve(a, None, b, None, C, psi_C, SpaceLabels(1, eps, 1))
        omega = t.psi[0] + t.psi[1] + t.phi[2]
        assert abs(omega / (2 * eps) - flat) <= 10 * eps
    assert study.row("S").extrapolated_error <= 1e-6


def test_contraction_rejects_zero_label():
    with pytest.raises(ValueError):
        contraction_study(SpaceLabels(1, 0, 1), "kappa1")
    with pytest.raises(ValueError):
        contraction_study(SpaceLabels(1, 1, 1), "kappa3")


def test_contract_command(capsys):
    code, out, _ = run(capsys, "contract", "--labels", "1,1,1", "--which", "kappa2", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["epsilons"] == list(cli.DEFAULT_EPSILONS)
    assert {r["invariant"] for r in doc["rows"]} >= {"omega", "Omega", "S", "s"}
    code, out, _ = run(capsys, "contract", "--labels", "1,1,1", "--which", "eta", "--csv", "--eps", "1e-2", "1e-3")
    assert code == 0
    assert out.splitlines()[0] == "invariant,limit,deviations,order,extrapolated_error"
    assert run(capsys, "contract", "--labels", "0,1,1", "--which", "eta")[0] == cli.EXIT_INPUT


# --- algebra-check -----------------------------------------------------------


def test_algebra_report_all_pass():
    report = algebra_report(SpaceLabels(1, 1, 1))
    assert report["commutators"] and report["casimir"] and report["duality"]
    assert all(report.values())


def test_algebra_check_command(capsys):
    code, out, _ = run(capsys, "algebra-check", "--json")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 27 and all(r["pass"] for r in rows)
    code, _, err = run(capsys, "algebra-check", "--labels", "1,1,1", "--corrupt")
    assert code == cli.EXIT_FAIL and err
