from __future__ import annotations

import csv

import pytest

from boltzspect.cli import EXIT_FORMAT, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, main
from boltzspect.solver import load


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


@pytest.fixture(scope="module")
def bigauss_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "bg.json"
    assert main(["solve", "--init", "bigauss", "--N", "20", "--out", str(path)]) == EXIT_OK
    return path


@pytest.fixture(scope="module")
def measure_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "ms.json"
    assert main(["solve", "--init", "measure", "--N", "20", "--out", str(path)]) == EXIT_OK
    return path


def test_eigen_tables(tmp_path):
    assert main(["eigen", "--n-max", "20", "--digits", "10", "--out", str(tmp_path)]) == EXIT_OK
    lam = _rows(tmp_path / "lambda.csv")
    assert lam[0] == ["n", "rat_part", "pi_part", "numeric"]
    row15 = [r for r in lam if r[0] == "15"][0]
    assert row15 == ["15", "41349267/8200192", "35102025/16777216", "11.61545300"]
    mu = _rows(tmp_path / "mu.csv")
    assert mu[0] == ["p", "q", "radicand", "rat_part", "pi_part", "numeric"]
    r11 = [r for r in mu if r[:2] == ["1", "1"]][0]
    assert abs(float(r11[5]) - 2.35) < 0.01


def test_eigen_minimal_and_power_law(tmp_path):
    assert main(["eigen", "--n-max", "2", "--out", str(tmp_path)]) == EXIT_OK
    assert len(_rows(tmp_path / "lambda.csv")) == 4
    out = tmp_path / "pl"
    assert main(["eigen", "--kernel", "power-law", "--s", "0.25", "--tol", "1e-10", "--n-max", "5",
                 "--digits", "15", "--out", str(out)]) == EXIT_OK
    lam = _rows(out / "lambda.csv")
    assert all(r[1] == "" and r[2] == "" for r in lam[1:])


def test_eigen_bad_arguments(tmp_path):
    assert main(["eigen", "--n-max", "1", "--out", str(tmp_path)]) == EXIT_USAGE
    assert main(["eigen", "--digits", "5"]) == EXIT_USAGE
    assert main(["eigen", "--kernel", "power-law", "--out", str(tmp_path)]) == EXIT_USAGE
    assert main(["nonsense"]) == EXIT_USAGE


def test_solve_prints_counts(measure_file, capsys):
    s = load(measure_file)
    assert s.N == 20 and len(s.h[4]) == 2
    out_path = measure_file.parent / "again.json"
    main(["solve", "--init", "measure", "--N", "6", "--out", str(out_path)])
    out = capsys.readouterr().out
    assert out.startswith("n,terms\n0,0\n")
    assert "solve time" in out


def test_solve_zero_coefficient_file(tmp_path):
    data = tmp_path / "zeros.csv"
    data.write_text("n,G_n\n" + "".join(f"{n},0\n" for n in range(21)))
    out = tmp_path / "z.json"
    assert main(["solve", "--init", f"coeffs:{data}", "--N", "20", "--out", str(out)]) == EXIT_OK
    assert all(not h for h in load(out).h)


def test_solve_bad_init(tmp_path):
    assert main(["solve", "--init", "bogus", "--out", str(tmp_path / "x.json")]) == EXIT_USAGE
    assert main(["solve", "--init", "eps:2", "--out", str(tmp_path / "x.json")]) == EXIT_USAGE
    assert main(["solve", "--N", "3", "--out", str(tmp_path / "x.json")]) == EXIT_USAGE


def test_eval_bigauss(bigauss_file, tmp_path):
    assert main(["eval", str(bigauss_file), "--out", str(tmp_path), "--initial", "bigauss"]) == EXIT_OK
    norms = _rows(tmp_path / "fig4_norms.csv")
    assert norms[0] == ["t", "lin", "nonlin", "R_20", "R_tilde"]
    assert max(float(r[3]) for r in norms[1:]) < 0.05
    assert _rows(tmp_path / "fig5_surface.csv")[0] == ["t", "v", "f_N"]
    assert _rows(tmp_path / "fig7_hn.csv")[0] == ["n", "t", "h_n"]
    assert _rows(tmp_path / "fig3_initial.csv")[0] == ["v", "F", "F_5", "F_10", "F_20"]


def test_eval_is_deterministic(bigauss_file, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["eval", str(bigauss_file), "--out", str(d), "--times", "0,0.5,1"]) == EXIT_OK
    for name in ("fig4_norms.csv", "fig5_surface.csv", "fig7_hn.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_eval_large_time(bigauss_file, tmp_path):
    from boltzspect.basis import mu
    assert main(["eval", str(bigauss_file), "--out", str(tmp_path), "--times", "50",
                 "--csv-digits", "20"]) == EXIT_OK
    rows = _rows(tmp_path / "fig5_surface.csv")[1:]
    assert max(abs(float(r[2]) - float(mu(abs(float(r[1]))))) for r in rows) < 1e-10


def test_eval_measure_dirac_like(measure_file, tmp_path):
    assert main(["eval", str(measure_file), "--out", str(tmp_path), "--times", "0.01,1",
                 "--velocities", "0"]) == EXIT_OK
    rows = _rows(tmp_path / "fig8_measure.csv")
    f = {r[0]: float(r[2]) for r in rows[1:]}
    assert f["0.01"] > 10 * f["1.0"]


def test_eval_errors(bigauss_file, tmp_path):
    assert main(["eval", str(bigauss_file), "--out", str(tmp_path), "--times", ""]) == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["eval", str(bad), "--out", str(tmp_path)]) == EXIT_FORMAT
    assert main(["eval", str(tmp_path / "missing.json")]) == EXIT_FORMAT


def test_ratio_and_stats(bigauss_file, capsys):
    assert main(["ratio", str(bigauss_file), "--times", "0.4,2"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "t,R_N,R_tilde"
    assert abs(float(lines[1].split(",")[1]) - 0.0353567) < 1e-6
    assert main(["stats", str(bigauss_file)]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,terms,sup_h,sup_h_over_G"
    assert lines[5].startswith("4,2,")


def test_oracle_commands(tmp_path, capsys):
    assert main(["oracle", "--init", "bigauss", "--N", "12", "--threshold", "1e-8", "--step", "1e-3",
                 "--csv", str(tmp_path / "o.csv")]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out
    assert _rows(tmp_path / "o.csv")[0][:3] == ["t", "g_0", "g_1"]
    assert main(["oracle", "--init", "measure", "--N", "12", "--t-start", "0.05"]) == EXIT_OK
    assert main(["oracle", "--init", "coeffs:zeros", "--N", "8"]) == EXIT_OK
    assert "max deviation 0.000e+00" in capsys.readouterr().out
    assert main(["oracle", "--init", "bigauss", "--N", "8", "--step", "0.2",
                 "--threshold", "1e-14"]) == EXIT_VALIDATION
    assert main(["oracle", "--N", "30"]) == EXIT_USAGE


def test_compare_precision(tmp_path, capsys):
    assert main(["compare-precision", "--init", "bigauss", "--N", "8", "--p1", "15", "--p2", "15"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "(15,15) relative error 0.0"
    lo, hi = tmp_path / "lo.json", tmp_path / "hi.json"
    main(["solve", "--N", "8", "--digits", "10", "--out", str(lo)])
    main(["solve", "--N", "8", "--digits", "20", "--out", str(hi)])
    capsys.readouterr()
    assert main(["compare-precision", "--series", str(lo), str(hi)]) == EXIT_OK
    err = float(capsys.readouterr().out.split()[-1])
    assert 0 < err < 1e-8
    assert main(["compare-precision"]) == EXIT_USAGE


def test_help_maps_outputs(capsys):
    assert main(["--help"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in ("lambda.csv", "mu.csv", "fig3_initial.csv", "fig4_norms.csv", "fig5_surface.csv",
                 "fig7_hn.csv", "fig8_measure.csv", "compare-precision", "oracle"):
        assert name in out
