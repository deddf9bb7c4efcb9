import json
import subprocess
import sys

import pytest

from theta_multiplier import cli
from theta_multiplier.character import theta_lambda
from theta_multiplier.selftest import run_selftest


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, [json.loads(line) for line in out.splitlines()]


def test_lambda_examples(capsys):
    code, rows = run(capsys, "lambda", "--g", "1", "--parity", "even", "--matrix", "[[0,-1],[1,0]]")
    assert code == 0 and rows[0]["lambda"] == 3 and rows[0]["member"]
    code, rows = run(capsys, "lambda", "--g", "1", "--parity", "odd", "--matrix", "[[1,1],[0,1]]")
    assert code == 0 and rows[0]["lambda"] == 1
    code, rows = run(capsys, "lambda", "--g", "1", "--parity", "even", "--matrix", "[[1,1],[0,1]]")
    assert code == 2 and rows == [{"member": False}]


def test_lambda_matrix_from_file(capsys, tmp_path):
    path = tmp_path / "m.json"
    path.write_text("[[0,3],[1,0]]")
    code, rows = run(capsys, "lambda", "--g", "1", "--matrix", str(path))
    assert code == 0 and rows[0]["lambda"] == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["lambda", "--g", "1", "--matrix", "[[0,1]"],
        ["lambda", "--g", "1", "--matrix", "[[0,1],[1,0],[1,1]]"],
        ["lambda", "--g", "0", "--matrix", "[]"],
        ["verify-theta", "--g", "4", "--seed", "1"],
        ["verify-theta", "--g", "1"],
        ["selftest"],
        ["nonsense"],
    ],
)
def test_invalid_input_exit_code(capsys, argv):
    assert cli.main(argv) == 2


def test_table(capsys):
    code, rows = run(capsys, "table", "--parity", "odd")
    assert code == 0
    assert rows[-1] == {"order": 48, "parity": "odd"}
    assert len(rows) == 49


def test_jm(capsys):
    code, rows = run(capsys, "jm", "--g", "1", "--l1", '{"basis": [[1,0]]}', "--l2", '{"basis": [[0,1]]}')
    assert code == 0
    assert rows[0]["m_jm"] == 3 == rows[0]["lambda_transport"]
    code, rows = run(
        capsys, "jm", "--g", "2", "--l1", '{"basis": [[1,0,0,0],[0,1,0,0]]}',
        "--matrix", "[[0,0,3,0],[0,0,0,3],[1,0,0,0],[0,1,0,0]]",
    )
    assert code == 0 and rows[0] == {"lambda_jm": 2, "lambda": 2}
    assert cli.main(["jm", "--g", "1", "--l1", '{"basis": [[1,1]]}', "--l2", '{"basis": [[0,1]]}']) == 2


def test_verify_theta_sweeps(capsys):
    code, rows = run(capsys, "verify-theta", "--g", "1", "--count", "50", "--word-length", "6",
                     "--tol", "1e-8", "--seed", "3")
    assert code == 0 and rows[-1]["passed"] and rows[-1]["max_residual"] < 1e-8
    code, rows = run(capsys, "verify-theta", "--g", "2", "--count", "25", "--word-length", "6",
                     "--tol", "1e-8", "--seed", "4")
    assert code == 0 and rows[-1]["passed"]
    code, rows = run(capsys, "verify-theta", "--g", "1", "--count", "3", "--tol", "0", "--seed", "5")
    assert code == 1 and not rows[-1]["passed"]


def test_verify_theta_single_point(capsys):
    tau = '{"re": [[0]], "im": [[2]]}'
    code, rows = run(capsys, "verify-theta", "--tau", tau, "--matrix", "[[0,-1],[1,0]]")
    assert code == 0 and rows[0]["lambda"] == 3 and rows[0]["residual"] < 1e-10
    assert cli.main(["verify-theta", "--tau", tau, "--matrix", "[[1,1],[0,1]]"]) == 2


def test_selftest_passes(capsys):
    code, rows = run(capsys, "selftest", "--seed", "7")
    assert code == 0
    assert rows[-1] == {"items": 26, "failed": 0, "passed": True}


def test_selftest_is_deterministic():
    cmd = [sys.executable, "-m", "theta_multiplier", "selftest", "--seed", "11"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second


def test_selftest_catches_negated_lambda():
    def negated(form, gamma, order_seed=None):
        return (-theta_lambda(form, gamma, order_seed)) % 4

    report = run_selftest(7, lam=negated)
    failed = {r["item"] for r in report if not r["passed"]}
    # -lambda has the same parity as lambda, so the Dickson item cannot see it
    assert "character.dickson_parity" not in failed
    assert {"character.transvection_value", "character.table_g1"} <= failed
