"""Command-line behaviour: outputs, formats, config files, exit codes."""
import json
import subprocess
import sys

import pytest

from qes.cli import main
from qes.numeric import ENV_VAR


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_table_n2(capsys):
    code, out, _ = run(capsys, "table", "--n", "2")
    assert code == 0
    assert "Q*_3(b,a) = a^3 - 4*a*b + 2" in out


def test_table_n1_cstar(capsys):
    code, out, _ = run(capsys, "table", "--n", "1")
    assert code == 0
    assert any(line.startswith("C*(b,a) = a ") for line in out.splitlines())


def test_table_n0(capsys):
    code, out, _ = run(capsys, "table", "--n", "0")
    assert code == 0
    assert "Q*_1(b,a) = a" in out


def test_table_json(capsys):
    code, out, _ = run(capsys, "table", "--n", "3", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == "qes.table/1"
    assert doc["family"]["n"] == 3
    assert doc["cstar_source"] == "exact certificate"


def test_table_beyond_exact_uses_constant_law(capsys):
    code, out, _ = run(capsys, "table", "--n", "6", "--format", "json")
    assert code == 0 and json.loads(out)["cstar_source"] == "constant law"


def test_locus_csv(capsys):
    code, out, _ = run(capsys, "locus", "--n", "2", "--b", "-6:6")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("# qes.locus/1")
    header = lines[1].split(",")
    assert header == ["branch", "arc", "b", "lambda", "a", "real_zero_count"]
    assert all(int(l.split(",")[5]) == 2 - 2 * int(l.split(",")[0]) for l in lines[2:])
    branches = {int(l.split(",")[0]) for l in lines[2:]}
    assert branches == {0, 1}
    # the branch without real zeros reaches both ends of the window
    bs = [float(l.split(",")[2]) for l in lines[2:] if l.startswith("1,")]
    assert min(bs) == pytest.approx(-6.0) and max(bs) == pytest.approx(6.0)


def test_locus_n1_merges_at_zero(capsys):
    code, out, _ = run(capsys, "locus", "--n", "1", "--b", "0:9")
    rows = [l.split(",") for l in out.splitlines()[2:]]
    assert code == 0
    assert all(float(r[2]) >= -1e-12 for r in rows)
    lams_at_9 = sorted(float(r[3]) for r in rows if abs(float(r[2]) - 9.0) < 1e-12)
    assert lams_at_9 == pytest.approx([75.0, 87.0])


def test_locus_n0_parabola(capsys):
    code, out, _ = run(capsys, "locus", "--n", "0", "--b", "-4:4")
    rows = [l.split(",") for l in out.splitlines()[2:]]
    assert code == 0 and rows
    assert all(float(r[3]) == pytest.approx(float(r[2]) ** 2) for r in rows)


def test_identical_runs_identical_files(tmp_path, capsys):
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for f in (f1, f2):
        assert main(["locus", "--n", "3", "--b", "-3:3", "-o", str(f)]) == 0
    assert f1.read_bytes() == f2.read_bytes()
    for f in (f1, f2):
        assert main(["verify", "equilibrium", "--n", "3", "--samples", "5", "--seed", "4",
                     "--format", "json", "-o", str(f)]) == 0
    assert f1.read_bytes() == f2.read_bytes()


def test_crossings_n0(capsys):
    code, out, _ = run(capsys, "crossings", "--n", "0", "--count", "3")
    rows = [l.split(",") for l in out.splitlines() if not l.startswith("#")]
    assert code == 0
    assert len(rows) == 4
    assert float(rows[1][1]) == pytest.approx(-1.4729153717, abs=1e-9)


def test_crossings_verified(capsys):
    code, out, _ = run(capsys, "crossings", "--n", "2", "--count", "2", "--verify-shooting")
    assert code == 0
    assert "PASS" in out


def test_crossings_odd_n_is_usage_error(capsys):
    code, _, err = run(capsys, "crossings", "--n", "1", "--count", "1")
    assert code == 2 and "odd" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "identity", "--n", "3"],
        ["verify", "topweight", "--n", "4"],
        ["verify", "discriminant", "--n", "5"],
        ["verify", "constant", "--n", "2"],
        ["verify", "asymptotics", "--n", "2"],
        ["verify", "equilibrium", "--n", "2", "--samples", "5"],
    ],
)
def test_verify_passes(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and "PASS" in out


def test_verify_reality(capsys):
    code, out, _ = run(capsys, "verify", "reality", "--J", "2", "--b", "0", "--count", "2")
    assert code == 0 and "PASS" in out


def test_mathematical_failure_exits_1(capsys):
    code, out, _ = run(capsys, "verify", "asymptotics", "--n", "2", "--b", "10", "--tol", "1e-9")
    assert code == 1 and "FAIL" in out


def test_usage_errors_exit_2(capsys):
    assert run(capsys, "table")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "locus", "--n", "1", "--b", "3:1")[0] == 2
    assert run(capsys, "table", "--n", "40")[0] == 2


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"n": 2, "format": "json"}))
    code, out, _ = run(capsys, "table", "--config", str(cfg))
    assert code == 0 and json.loads(out)["n"] == 2
    # the command line wins over the file
    code, out, _ = run(capsys, "table", "--config", str(cfg), "--n", "1")
    assert json.loads(out)["n"] == 1


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    code, _, err = run(capsys, "table", "--n", "1", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_precision_flag_sets_environment(capsys, monkeypatch):
    monkeypatch.setenv(ENV_VAR, "53")
    code, out, _ = run(capsys, "verify", "identity", "--n", "5", "--samples", "3", "--precision-bits", "160")
    assert code == 0
    import os

    assert os.environ[ENV_VAR] == "160"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qes", "table", "--n", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "Q*_2(b,a) = a^2 - b" in proc.stdout
