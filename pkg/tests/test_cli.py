import json
import subprocess
import sys

import pytest

from umbralpoly.cli import EXIT_FALSIFIED, EXIT_INVALID, EXIT_NUMERIC, EXIT_PASS, main

LEGENDRE = ["--family", "classical", "--xi", "1,-1,0", "--eta", "2,-1"]


def run(argv, tmp_path):
    out = tmp_path / "out.json"
    code = main(argv + ["--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() and argv[-1] != "csv" else None)


def test_family_krall_json(tmp_path):
    code, rep = run(["family", "--family", "krall", "--alpha", "2", "--beta", "3", "--depth", "8", "--format", "json"], tmp_path)
    assert code == EXIT_PASS
    assert rep["moments"][1] == "8/9"
    assert rep["b"][0] == "8/9"
    assert rep["mode"] == "exact"


def test_family_classical_table_csv(tmp_path):
    out = tmp_path / "t.csv"
    code = main(["family", *LEGENDRE, "--depth", "4", "--format", "csv", "--out", str(out)])
    assert code == EXIT_PASS
    rows = [line.split(",") for line in out.read_text().splitlines()]
    assert rows[0] == ["n", "mu", "g", "b", "u", "h"]
    assert [r[2] for r in rows[1:]] == [f"1/{n + 1}" if n else "1" for n in range(9)]


def test_family_float_mode(tmp_path):
    code, rep = run(["family", "--family", "krall", "--alpha", "2.0", "--beta", "3", "--depth", "3"], tmp_path)
    assert code == EXIT_PASS and rep["mode"] == "float"
    assert abs(rep["moments"][1][0] - 8 / 9) < 1e-15


def test_dunkl_family_lists_mu(tmp_path):
    code, rep = run(["family", "--family", "dunkl", "--eta", "1/2", "--depth", "4"], tmp_path)
    assert code == EXIT_PASS and rep["mu"] == ["0", "2", "2", "4", "4"]


def test_depth_zero_is_usage_error(capsys):
    assert main(["family", "--family", "krall", "--alpha", "2", "--beta", "3", "--depth", "0"]) == EXIT_INVALID


def test_invalid_params_name_the_precondition(capsys):
    assert main(["family", "--family", "krall", "--alpha", "2", "--beta", "2"]) == EXIT_INVALID
    assert "beta != alpha" in capsys.readouterr().err
    assert main(["family", "--family", "classical", "--xi", "1,2"]) == EXIT_INVALID


def test_check_legendre(tmp_path):
    code, rep = run(["check", *LEGENDRE, "--depth", "10"], tmp_path)
    assert code == EXIT_PASS
    assert rep["verdict"] is True and rep["band_width"] == 1 and rep["failing_cell"] is None
    assert rep["depth"] == 10 and rep["max_residual"] == 0
    assert rep["lambda"][:3] == ["0", "12", "36"]
    assert rep["christoffel"]["pi"] == ["0", "6", "-6"]
    assert rep["mu_recurrence"]["alpha"] == ["1", "-2", "1"]


def test_check_constant_mu_is_falsified(tmp_path):
    mu = tmp_path / "mu.json"
    mu.write_text(json.dumps(["0"] + ["1"] * 30))
    g = tmp_path / "g.json"
    g.write_text(json.dumps([f"1/{n + 1}" for n in range(60)]))
    code, rep = run(["check", "--moments", str(g), "--mu", str(mu), "--depth", "10"], tmp_path)
    assert code == EXIT_FALSIFIED
    assert rep["verdict"] is False and rep["reason"] == "gram"
    assert rep["failing_cell"] is not None


def test_check_zero_mass_file(tmp_path):
    g = tmp_path / "g.csv"
    g.write_text("0\n1/2\n1/3\n")
    mu = tmp_path / "mu.csv"
    mu.write_text("\n".join(str(n) for n in range(10)))
    code, _ = run(["check", "--moments", str(g), "--mu", str(mu)], tmp_path)
    assert code == EXIT_INVALID


def test_check_short_moment_file(tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps(["1", "1/2", "1/3"]))
    mu = tmp_path / "mu.json"
    mu.write_text(json.dumps([str(n) for n in range(40)]))
    code, _ = run(["check", "--moments", str(g), "--mu", str(mu), "--depth", "4"], tmp_path)
    assert code == EXIT_INVALID


@pytest.mark.parametrize("flag,value", [("--perturb-mu", "3,1/7"), ("--perturb-g", "5,1/100"), ("--perturb-r", "2,1,1/3")])
def test_negative_controls(tmp_path, flag, value):
    code, rep = run(["check", *LEGENDRE, flag, value], tmp_path)
    assert code == EXIT_FALSIFIED and rep["verdict"] is False


def test_check_krall_nonlocal(tmp_path):
    code, rep = run(["check", "--family", "krall", "--alpha", "2", "--beta", "3", "--depth", "8"], tmp_path)
    assert code == EXIT_PASS
    assert rep["band_width"] == "nonlocal" and rep["lambda"][1:] == ["1"] * 8
    assert rep["christoffel"] is None


def test_check_qclassical(tmp_path):
    code, rep = run(["check", "--family", "qclassical", "--q", "1/2", "--xi", "1,-1,0", "--eta=-1/4,1/2"], tmp_path)
    assert code == EXIT_PASS and rep["band_width"] == 1


HERMITE = ["--family", "classical", "--xi", "0,0,1", "--eta=-2,0"]


def test_tolerance_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("UMBRALPOLY_TOL", "1e-9")
    code, rep = run(["check", *HERMITE, "--mode", "float", "--depth", "5"], tmp_path)
    assert code == EXIT_PASS and rep["mode"] == "float" and rep["band_width"] == 2
    qfloat = ["check", "--family", "qclassical", "--q", "0.5", "--xi", "1,-1,0", "--eta=-0.25,0.5", "--depth", "2"]
    assert main(qfloat + ["--out", str(tmp_path / "q.json")]) == EXIT_PASS
    monkeypatch.setenv("UMBRALPOLY_TOL", "0")
    assert main(qfloat + ["--out", str(tmp_path / "q.json")]) == EXIT_FALSIFIED
    monkeypatch.setenv("UMBRALPOLY_TOL", "-1")
    assert main(["check", *LEGENDRE]) == EXIT_INVALID


def test_float_ill_conditioning_is_a_numeric_failure(capsys):
    # the Legendre Hankel matrices are Hilbert matrices: singular in double precision by n ~ 10
    assert main(["check", *LEGENDRE, "--mode", "float", "--depth", "6"]) == EXIT_NUMERIC
    assert "exact mode" in capsys.readouterr().err


def test_elliptic_generic(tmp_path):
    argv = ["elliptic", "verify", "--g2", "4", "--g3", "1", "--w", "0.1", "--alpha", "0.3", "--beta", "0.7",
            "--depth", "8", "--tol", "1e-10"]
    code, rep = run(argv, tmp_path)
    assert code == EXIT_PASS
    assert rep["pipeline"] == "float-sigma"
    assert all(v < 1e-10 for v in rep["identities"]["max_residuals"].values())
    assert rep["three_way"]["hankel_vs_direct"] < 1e-8
    assert rep["shift"]["max_residual"] < 1e-8


def test_elliptic_rational_limit_routes_exact(tmp_path):
    code, rep = run(["elliptic", "verify", "--g2", "0", "--g3", "0", "--w", "1", "--alpha", "2", "--beta", "3"], tmp_path)
    assert code == EXIT_PASS
    assert rep["pipeline"] == "exact-krall" and rep["classical"]["verdict"] is True
    assert rep["three_way"]["hankel_vs_direct"] == 0


def test_elliptic_beta_equals_alpha():
    assert main(["elliptic", "verify", "--alpha", "0.3", "--beta", "0.3"]) == EXIT_INVALID


def test_elliptic_out_of_radius():
    # arguments w (n + alpha + ...) far beyond the validated sigma radius
    assert main(["elliptic", "verify", "--w", "0.5", "--poly-depth", "6"]) == EXIT_NUMERIC


def test_json_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["check", *LEGENDRE, "--out", str(a)])
    main(["check", *LEGENDRE, "--out", str(b)])
    assert a.read_text() == b.read_text()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "umbralpoly", "family", "--family", "krall", "--alpha", "2",
                          "--beta", "3", "--depth", "1"], capture_output=True, text=True)
    assert res.returncode == 0 and '"8/9"' in res.stdout
