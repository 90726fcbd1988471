import json
import subprocess
import sys

import pytest

from symflow.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_tables(capsys):
    code, out, _ = run(["tables", "--n", "4"], capsys)
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r["rencontres"] for r in rows] == [9, 8, 6, 0, 1]
    assert rows[0]["fraction"] == "3/8"


def test_tables_csv(capsys):
    code, out, _ = run(["tables", "--n", "3", "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "k,factorial,derangements,rencontres,fraction"
    assert lines[1] == "0,1,1,2,1/3"


def test_eval_exact(capsys):
    code, out, _ = run(["eval", "--n", "3", "--point", "1,1,4", "--exact"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["L_exact"] == "2"
    assert data["f"] == pytest.approx(1 / 3)


def test_eval_fraction_point_and_zero_gradient(capsys):
    code, out, _ = run(["eval", "--n", "4", "--point", "1/2,0,2,3"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["point"] == [0.5, 0.0, 2.0, 3.0]
    assert data["gradient"][1] is None


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--n", "3", "--point", "1,1"],
        ["eval", "--n", "3", "--point", "1,-1,1"],
        ["eval", "--n", "3", "--point", "a,b,c"],
        ["tables", "--n", "-1"],
        ["verify", "--n", "0"],
        ["verify", "--n", "2", "--mode", "minimize", "--samples", "2"],
    ],
)
def test_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1 and "error" in err


def test_unknown_flag_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--n", "4", "--bogus"])
    assert exc.value.code == 1


def test_verify_json(capsys):
    code, out, _ = run(["verify", "--n", "4", "--samples", "500", "--seed", "2"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["violations"] == 0 and data["seed"] == 2 and data["n"] == 4


def test_verify_to_file(tmp_path, capsys):
    path = tmp_path / "r.csv"
    code, out, _ = run(["verify", "--n", "3", "--samples", "200", "--format", "csv", "--output", str(path)], capsys)
    assert code == 0 and out == ""
    assert path.read_text().startswith("record,name,passed")


def test_flow_command(capsys):
    code, out, _ = run(["flow", "--n", "4", "--start", "3,0.2,1.5,0.7"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["monotone"] and data["distance_to_ones"] <= 1e-4
    assert data["initial_region"] == "descent"


def test_check_lemmas_command(capsys):
    code, out, _ = run(["check-lemmas", "--n", "5", "--samples", "200", "--seed", "1"], capsys)
    assert code == 0
    assert all(c["passed"] for c in json.loads(out)["checks"].values())


def test_violation_exit_code(monkeypatch, capsys):
    from symflow import verify

    real = verify.verify_sampling

    def broken(cfg):
        rep = real(cfg)
        rep.violations = 1
        return rep

    monkeypatch.setattr(verify, "verify_sampling", broken)
    code, _, _ = run(["verify", "--n", "3", "--samples", "10"], capsys)
    assert code == 2


def test_console_script_entry():
    proc = subprocess.run(
        [sys.executable, "-m", "symflow.cli", "tables", "--n", "2"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 2
