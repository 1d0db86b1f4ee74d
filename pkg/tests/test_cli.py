import json
import subprocess
import sys

import pytest

from critgrad.cli import main

EXAMPLE = """
[domain]
dim = 1
x = -2*pi, 2*pi
n = 200

[coefficients]
mu = 1.0
cplus = "if x < 0 then 0 else cos(x) + 1"
cminus = "0"
h = "if x < 0 then cos(x) - sin(x)^2 else 0"
"""

UNIT = """
[domain]
dim = 1
x = 0, 1
n = {n}

[coefficients]
mu = 1.0
cplus = "1"
cminus = "0"
h = "{h}"
"""


def write(tmp_path, text, name="c.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_pass(tmp_path, capsys):
    code, out, _ = run(["check", "--config", write(tmp_path, EXAMPLE)], capsys)
    assert code == 0 and json.loads(out)["status"] == "pass"


@pytest.mark.parametrize("cplus,cminus", [("1", "1"), ("0", "0"), ("1", "if x < 0.5 then -1 else 0")])
def test_check_violation(tmp_path, capsys, cplus, cminus):
    text = UNIT.format(n=10, h="0").replace('cplus = "1"', f'cplus = "{cplus}"').replace(
        'cminus = "0"', f'cminus = "{cminus}"'
    )
    code, out, _ = run(["check", "--config", write(tmp_path, text)], capsys)
    data = json.loads(out)
    assert code == 2 and data["status"] == "violation" and data["violations"]


def test_check_offending_nodes(tmp_path, capsys):
    text = UNIT.format(n=10, h="0").replace('cminus = "0"', 'cminus = "if x > 0.5 then 1 else 0"')
    code, out, _ = run(["check", "--config", write(tmp_path, text)], capsys)
    v = json.loads(out)["violations"][0]
    assert code == 2 and v["nodes"] == [5, 6, 7, 8, 9] and v["count"] == 5


def test_config_error_exit_1(tmp_path, capsys):
    code, _, err = run(["check", "--config", write(tmp_path, "[domain]\ndim = 7\n")], capsys)
    assert code == 1 and "dim" in err
    code, _, err = run(["md"], capsys)
    assert code == 1 and "--config" in err
    code, _, _ = run(["check", "--config", str(tmp_path / "none.ini")], capsys)
    assert code == 1
    code, _, _ = run(["scenario", "nope"], capsys)
    assert code == 1


def test_assumption_error_exit_2(tmp_path, capsys):
    text = UNIT.format(n=10, h="0").replace('cminus = "0"', 'cminus = "1"')
    code, out, _ = run(["md", "--config", write(tmp_path, text)], capsys)
    data = json.loads(out)
    assert code == 2 and data["kind"] == "assumption" and data["nodes"] == list(range(10))


def test_md_command(tmp_path, capsys):
    code, out, _ = run(["md", "--config", write(tmp_path, UNIT.format(n=400, h="1"))], capsys)
    data = json.loads(out)
    assert code == 0 and data["value"] == pytest.approx(0.898679, abs=1e-5) and data["sign_equivalent"]


def test_eigen_command(tmp_path, capsys):
    code, out, _ = run(["eigen", "--config", write(tmp_path, UNIT.format(n=400, h="0"))], capsys)
    data = json.loads(out)
    assert code == 0 and data["gamma1"] == pytest.approx(9.8696, abs=1e-4) and data["phi1_positive"]


def test_solve_command_writes_outputs(tmp_path, capsys):
    cfg = write(tmp_path, UNIT.format(n=100, h="0.05") + "[lambda]\nmode = grid\nvalues = 2, 4\n")
    out_dir = tmp_path / "out"
    code, out, _ = run(["solve", "--config", cfg, "--out", str(out_dir)], capsys)
    assert code == 0
    assert (out_dir / "solve.json").read_text() == out
    data = json.loads(out)
    assert [r["kind"] for r in data["records"]] == ["minimal", "mountain_pass"] * 2
    csv_lines = (out_dir / "solve.csv").read_text().splitlines()
    assert csv_lines[0] == "scenario,lambda,kind,energy,residual,umin,umax,ordering" and len(csv_lines) == 5


def test_solver_error_exit_3(tmp_path, capsys):
    cfg = write(tmp_path, UNIT.format(n=100, h="0.05") + "[lambda]\nvalue = 12\n")
    code, out, _ = run(["solve", "--config", cfg], capsys)
    data = json.loads(out)
    assert code == 3 and data["kind"] == "SolverError" and "diagnostics" in data


def test_sweep_bracket(tmp_path, capsys):
    cfg = write(tmp_path, UNIT.format(n=100, h="0.05") + "[lambda]\nmode = bracket\nlo = 4\nhi = 16\n")
    code, out, _ = run(["sweep", "--config", cfg], capsys)
    data = json.loads(out)
    lo, hi = data["bracket"]
    assert code == 0 and hi - lo <= 1e-3 * hi and 8.7 < lo < 8.9


def test_sweep_bracket_error_exit_3(tmp_path, capsys):
    cfg = write(tmp_path, UNIT.format(n=100, h="0.05") + "[lambda]\nmode = bracket\nlo = 10\nhi = 16\n")
    code, out, _ = run(["sweep", "--config", cfg], capsys)
    assert code == 3 and json.loads(out)["kind"] == "BracketError"


def test_scenario_example1d(capsys, tmp_path):
    code, out, _ = run(["scenario", "example1d", "--out", str(tmp_path)], capsys)
    data = json.loads(out)
    assert code == 0 and data["passed"]
    err = next(v for v in data["verdicts"] if v["name"] == "u0_matches_exact")["evidence"]["max_error"]
    assert err <= 5e-4
    assert (tmp_path / "example1d.csv").exists()


def test_scenario_verdict_failure_exit_4(capsys):
    # too coarse for the error bound: the run completes but a verdict fails
    code, out, _ = run(["scenario", "example1d", "--grid", "20"], capsys)
    assert code == 4 and not json.loads(out)["passed"]


def test_scenario_deterministic_bytes(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(["scenario", "th3_sign", "--seed", "3", "--out", str(d)], capsys)[0] == 0
    assert (a / "th3_sign.json").read_bytes() == (b / "th3_sign.json").read_bytes()
    assert (a / "th3_sign.csv").read_bytes() == (b / "th3_sign.csv").read_bytes()


def test_console_script_entry_point(tmp_path):
    cfg = write(tmp_path, EXAMPLE)
    proc = subprocess.run(
        [sys.executable, "-m", "critgrad.cli", "check", "--config", cfg], capture_output=True, text=True
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["status"] == "pass"


def test_shipped_configs_pass_check(capsys):
    import pathlib

    root = pathlib.Path(__file__).resolve().parents[1] / "configs"
    paths = sorted(root.glob("*.ini"))
    assert paths
    for p in paths:
        code, out, _ = run(["check", "--config", str(p)], capsys)
        assert code == 0, p.name
