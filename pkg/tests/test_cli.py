import json

import numpy as np
import pytest

from caputo_density.cli import main
from caputo_density.special_functions import gamma


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    assert lines[0].startswith("# config-hash: ")
    header = lines[1].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[2:]])
    return lines[0], header, data


def test_derivative_linear_closed_form(tmp_path, capsys):
    out = tmp_path / "d.csv"
    code, _, _ = run_cli(
        capsys, "derivative", "--profile", "linear", "--s", "0.5",
        "--grid", "0.1:2:40", "--out", str(out),
    )
    assert code == 0
    _, header, data = read_csv(out)
    assert header == ["x", "caputo"]
    expect = data[:, 0] ** 0.5 / gamma(1.5)
    np.testing.assert_allclose(data[:, 1], expect, atol=1e-10)


def test_derivative_constant_is_zero(tmp_path, capsys):
    out = tmp_path / "d.csv"
    code, _, _ = run_cli(
        capsys, "derivative", "--profile", "constant", "--grid", "0.1:2:10",
        "--out", str(out),
    )
    assert code == 0
    _, _, data = read_csv(out)
    np.testing.assert_allclose(data[:, 1], 0.0, atol=1e-300)


def test_derivative_of_solved_extension_is_residual(tmp_path, capsys):
    out = tmp_path / "d.csv"
    code, _, _ = run_cli(
        capsys, "derivative", "--profile", "appendix-es1", "--grid", "1.05:5:25",
        "--out", str(out),
    )
    assert code == 0
    _, _, data = read_csv(out)
    assert np.max(np.abs(data[:, 1])) <= 1e-5


def test_derivative_rejects_unknown_profile(tmp_path, capsys):
    code, _, err = run_cli(
        capsys, "derivative", "--profile", "nonsense", "--grid", "0.1:1:5",
        "--out", str(tmp_path / "d.csv"),
    )
    assert code == 2
    assert "unknown profile" in err


@pytest.mark.parametrize("profile,oracle_tol", [("appendix-es1", 1e-6), ("appendix-es2", 1e-6)])
def test_extend_reports_oracle_deviation(tmp_path, capsys, profile, oracle_tol):
    out = tmp_path / "e.csv"
    code, stdout, _ = run_cli(
        capsys, "extend", "--profile", profile, "--grid", "1.01:5:60", "--out", str(out),
    )
    assert code == 0
    report = json.loads(stdout)
    assert report["command"] == "extend"
    assert report["oracle_deviation"] <= oracle_tol
    assert report["residual_max"] <= 1e-5
    assert report["exit_reason"] == "ok"
    _, header, data = read_csv(out)
    assert header == ["x", "u", "g", "residual"]


def test_extend_constant_profile_constant_column(tmp_path, capsys):
    out = tmp_path / "e.csv"
    code, stdout, _ = run_cli(
        capsys, "extend", "--profile", "constant", "--grid", "1.01:4:20", "--out", str(out),
    )
    assert code == 0
    _, _, data = read_csv(out)
    np.testing.assert_allclose(data[:, 1], 1.0, atol=1e-12)


def test_extend_residual_gate_exit_code(tmp_path, capsys):
    code, stdout, _ = run_cli(
        capsys, "extend", "--profile", "appendix-es1", "--grid", "1.01:5:20",
        "--tol", "1e-20", "--out", str(tmp_path / "e.csv"),
    )
    assert code == 3
    assert "above tol" in json.loads(stdout)["exit_reason"]


def test_extend_rejects_grid_left_of_b(tmp_path, capsys):
    code, _, err = run_cli(
        capsys, "extend", "--profile", "appendix-es1", "--grid", "0.5:5:20",
        "--out", str(tmp_path / "e.csv"),
    )
    assert code == 2
    assert "right of b" in err


def test_blowup_kappa_and_rate(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code, stdout, _ = run_cli(
        capsys, "blowup", "--j-list", "4,8,16,32,64", "--out", str(out),
    )
    assert code == 0
    report = json.loads(stdout)
    fitted = report["kappa"]["fitted"]
    cand_a, cand_b = report["kappa"]["candidate_a"], report["kappa"]["candidate_b"]
    assert fitted > 0.0
    matches = [abs(fitted - c) <= 0.01 * abs(c) for c in (cand_a, cand_b)]
    assert sum(matches) == 1
    assert -1.3 <= report["rate_exponent"] <= -0.7
    _, header, data = read_csv(out)
    assert header == ["j", "sup_error"]
    assert np.all(np.diff(data[:, 1]) < 0.0)


def test_approximate_constant_target_exact(tmp_path, capsys):
    code, stdout, _ = run_cli(
        capsys, "approximate", "--f", "3", "--k", "1", "--eps", "1e-2",
        "--out", str(tmp_path / "a.csv"),
    )
    assert code == 0
    report = json.loads(stdout)
    assert report["epsilon_achieved"] <= 1e-12
    assert report["residual_max"] == 0.0


def test_approximate_square_exit_zero(tmp_path, capsys):
    out = tmp_path / "a.csv"
    code, stdout, _ = run_cli(
        capsys, "approximate", "--f", "x^2", "--k", "0", "--eps", "1e-2", "--out", str(out),
    )
    assert code == 0
    report = json.loads(stdout)
    assert report["epsilon_achieved"] < 1e-2
    assert report["residual_max"] <= 1e-4
    assert report["errors"]["per_derivative"]
    assert report["initial_point"] < 0.0
    _, header, data = read_csv(out)
    assert header == ["x", "f", "u", "u_minus_f"]
    np.testing.assert_allclose(data[:, 3], data[:, 2] - data[:, 1], atol=1e-15)


def test_csv_and_json_are_deterministic(tmp_path, capsys):
    args = ["extend", "--profile", "appendix-es2", "--grid", "1.01:3:30"]
    out1, out2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    _, json1, _ = run_cli(capsys, *args, "--out", str(out1))
    _, json2, _ = run_cli(capsys, *args, "--out", str(out2))
    body1 = out1.read_text().split("\n", 1)[1]
    body2 = out2.read_text().split("\n", 1)[1]
    assert body1 == body2
    strip = lambda text: {k: v for k, v in json.loads(text).items() if k != "config"}
    assert strip(json1) == strip(json2)


def test_config_file_merged_under_flags(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"profile": "appendix-es1", "grid": "1.01:4:15", "s": 0.5}))
    out = tmp_path / "c.csv"
    # the flag wins over the file for the grid
    code, stdout, _ = run_cli(
        capsys, "extend", "--config", str(cfg), "--grid", "1.01:2:7", "--out", str(out),
    )
    assert code == 0
    _, _, data = read_csv(out)
    assert data.shape[0] == 7
    assert json.loads(stdout)["config"]["profile"] == "appendix-es1"


def test_invalid_order_rejected(tmp_path, capsys):
    code, _, err = run_cli(
        capsys, "extend", "--profile", "appendix-es1", "--s", "1.5",
        "--grid", "1.01:2:5", "--out", str(tmp_path / "x.csv"),
    )
    assert code == 2


def test_seventeen_digit_csv(tmp_path, capsys):
    out = tmp_path / "d.csv"
    run_cli(capsys, "derivative", "--profile", "linear", "--grid", "0.1:1:3",
            "--out", str(out))
    line = out.read_text().splitlines()[2]
    x_text = line.split(",")[0]
    assert float(x_text) == 0.1
    assert len(x_text.replace(".", "").replace("-", "").lstrip("0")) >= 16


def test_approximate_monomial_flag(tmp_path, capsys):
    code, stdout, _ = run_cli(
        capsys, "approximate", "--m", "1", "--k", "0", "--eps", "1e-2",
        "--out", str(tmp_path / "m.csv"),
    )
    assert code == 0
    report = json.loads(stdout)
    assert report["epsilon_achieved"] < 1e-2
    assert report["delta"]["1"] > 0.0


def test_approximate_csv_samples_target(tmp_path, capsys):
    xs = np.linspace(0.0, 1.0, 60)
    path = tmp_path / "samples.csv"
    path.write_text(
        "# sampled target\nx,f\n"
        + "\n".join(f"{x},{0.5 + 0.25 * x * x}" for x in xs)
        + "\n"
    )
    code, stdout, _ = run_cli(
        capsys, "approximate", "--f", f"csv:{path}", "--k", "0", "--eps", "2e-2",
        "--out", str(tmp_path / "c.csv"),
    )
    assert code == 0
    assert json.loads(stdout)["epsilon_achieved"] < 2e-2


def test_derivative_poly_profile(tmp_path, capsys):
    # quadratic data t^2 on [0, 2]: D_0^s t^2 = 2 x^(2-s)/Gamma(3-s)
    out = tmp_path / "p.csv"
    code, _, _ = run_cli(
        capsys, "derivative", "--poly", "0,0,1", "--a", "0", "--b", "2",
        "--s", "0.5", "--grid", "0.2:2:10", "--out", str(out),
    )
    assert code == 0
    _, _, data = read_csv(out)
    expect = 2.0 * data[:, 0] ** 1.5 / gamma(2.5)
    np.testing.assert_allclose(data[:, 1], expect, rtol=1e-12)
