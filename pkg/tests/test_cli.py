import json

from hodgenerve.cli import main

CONFIG = """\
[space]
kind = flat_torus
lengths = [1.0, 1.0]

[experiment]
epsilon = [0.2]
resolution = 200
qmax = 2
p = 1
k_max = 5
trials = 10
"""


def write(tmp_path, text=CONFIG):
    p = tmp_path / "c.ini"
    p.write_text(text)
    return str(p)


def test_audit_exit_zero(tmp_path):
    out = tmp_path / "out"
    assert main(["audit", "--config", write(tmp_path), "--out", str(out)]) == 0
    assert (out / "summary.json").exists() and (out / "metadata.json").exists()
    assert "written_at" not in (out / "summary.json").read_text()


def test_config_error_exit_one(tmp_path, capsys):
    cfg = write(tmp_path, CONFIG.replace("[0.2]", "[]"))
    assert main(["audit", "--config", cfg]) == 1
    assert "line 6" in capsys.readouterr().err


def test_usage_error_exit_one():
    assert main(["nonsense"]) == 1
    assert main(["treves"]) == 1


def test_guard_abort_is_a_failure(tmp_path):
    cfg = write(tmp_path, CONFIG.replace("[0.2]", "[0.2, 0.3]"))
    assert main(["nerve", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_treves_outputs(tmp_path):
    assert main(["treves", "--m", "4", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "counterexample.csv").read_text() == "m,ratio_num,ratio_den\n4,14,3\n"
    audits = json.loads((tmp_path / "audits.json").read_text())
    assert {"bound", "lhs", "rhs_log", "pass", "instance"} <= set(audits[0])


def test_compare_torus_csv_columns(tmp_path):
    assert main(["compare-torus", "--config", write(tmp_path), "--out", str(tmp_path / "o")]) == 0
    lines = (tmp_path / "o" / "comparison.csv").read_text().splitlines()
    assert lines[0] == "epsilon,k,lambda_X,lambda_M,ratio,harmonic_flag"
    assert (tmp_path / "o" / "band.gp").exists()


def test_net_and_spectrum_and_whitney(tmp_path):
    cfg = write(tmp_path)
    assert main(["net", "--config", cfg, "--out", str(tmp_path / "n")]) == 0
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path / "s")]) == 0
    assert (tmp_path / "s" / "eps_0.2" / "spectrum_q1.csv").exists()
    assert main(["whitney-check", "--config", cfg, "--out", str(tmp_path / "w")]) == 0
    text = (tmp_path / "w" / "eps_0.2" / "residual_study.csv").read_text()
    assert text.startswith("check_name,N,residual,observed_order\n")
