import csv
import io
import json
import math

import pytest

from gaussmi import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_gain_invariant_rows(capsys):
    code, out, _ = run(capsys, "sweep", "--schemes", "2d_coh_1", "--n-min", "1", "--n-max", "1",
                       "--n-points", "1", "--gains", "10,1", "--threads", "1")
    assert code == 0
    assert out.splitlines()[0] == "scheme,n,g,mi_bits,mi_formula_bits,abs_diff"
    rows = rows_of(out)
    assert [r["g"] for r in rows] == ["1", "10"]
    assert all(float(r["mi_bits"]) == pytest.approx(1.0, abs=1e-12) for r in rows)


def test_sweep_sorted_zero_rows_and_double_entry(capsys):
    code, out, _ = run(capsys, "sweep", "--n-points", "6", "--gains", "5,1,2", "--threads", "3")
    assert code == 0
    rows = rows_of(out)
    keys = [(r["scheme"], float(r["n"]), float(r["g"])) for r in rows]
    assert keys == sorted(keys)
    assert len(rows) == 10 * 6 * 3
    for r in rows:
        if float(r["n"]) == 0:
            assert float(r["mi_bits"]) == 0.0 and float(r["mi_formula_bits"]) == 0.0
        assert float(r["abs_diff"]) <= 1e-9


def test_sweep_byte_stable_across_threads(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["sweep", "--gains", "1,3", "--threads", "1", "--out", str(a)]) == 0
    assert cli.main(["sweep", "--gains", "1,3", "--threads", "4", "--out", str(b)]) == 0
    data = a.read_bytes()
    assert data == b.read_bytes()
    assert b"\r" not in data and data.endswith(b"\n")


def test_nats_header(capsys):
    code, out, _ = run(capsys, "sweep", "--schemes", "2d_coh_1", "--n-min", "1", "--n-max", "1",
                       "--n-points", "1", "--base", "nats")
    assert code == 0
    assert out.splitlines()[0] == "scheme,n,g,mi_nats,mi_formula_nats,abs_diff"
    assert float(rows_of(out)[0]["mi_nats"]) == pytest.approx(math.log(2), abs=1e-11)


@pytest.mark.parametrize("argv", [
    ["sweep", "--schemes", "bogus"],
    ["sweep", "--gains", "0.5"],
    ["sweep", "--n-min", "-1"],
    ["sweep", "--base", "decibels"],
    ["figure", "fig9"],
    ["nosuchcommand"],
])
def test_usage_errors_exit_one(capsys, argv):
    try:
        code = cli.main(argv)
    except SystemExit as exc:  # argparse rejects before dispatch
        code = exc.code
    assert code == 1
    assert capsys.readouterr().err


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"schemes": "1d_coh_1", "n_min": 2, "n_max": 2, "n_points": 1, "gains": "1,2"}))
    code, out, _ = run(capsys, "sweep", "--config", str(cfg), "--gains", "4")
    assert code == 0
    rows = rows_of(out)
    assert [(r["scheme"], r["n"], r["g"]) for r in rows] == [("1d_coh_1", "2", "4")]


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nmax": 3}))
    code, _, err = run(capsys, "sweep", "--config", str(cfg))
    assert code == 1 and "nmax" in err


def test_fig2(capsys, tmp_path):
    path = tmp_path / "f.csv"
    assert cli.main(["figure", "fig2", "--out", str(path)]) == 0
    rows = rows_of(path.read_text())
    assert list(rows[0]) == ["n", "eq9", "eq13", "eq14", "eq15"]
    assert len(rows) == 101
    at2 = next(r for r in rows if float(r["n"]) == 2)
    assert float(at2["eq13"]) == pytest.approx(float(at2["eq14"]), abs=1e-9)
    assert float(at2["eq13"]) == pytest.approx(math.log2(5), abs=1e-9)


def test_fig3(capsys, tmp_path):
    path = tmp_path / "f.csv"
    assert cli.main(["figure", "fig3", "--out", str(path)]) == 0
    rows = rows_of(path.read_text())
    for r in rows:
        assert float(r["eq11_g1"]) == pytest.approx(float(r["eq15"]), abs=1e-9)
        assert float(r["eq10_ginf"]) <= float(r["eq10_g1"]) + 1e-12
        assert float(r["eq11_ginf"]) <= float(r["eq11_g1"]) + 1e-12


def test_figA1(capsys, tmp_path):
    path = tmp_path / "f.csv"
    assert cli.main(["figure", "figA1", "--out", str(path)]) == 0
    rows = rows_of(path.read_text())
    assert list(rows[0]) == ["g", "eq11", "eq10", "eq5", "eq11_asymptote", "eq10_asymptote", "eq5_asymptote"]
    assert float(rows[0]["g"]) == 1 and float(rows[-1]["g"]) == 100
    assert rows[0]["eq11"] == "inf"
    at2 = next(r for r in rows if float(r["g"]) == 2)
    assert float(at2["eq10"]) == pytest.approx(4 / 3, abs=1e-6)


def test_figure_default_path(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert cli.main(["figure", "fig2"]) == 0
    assert (tmp_path / "fig2.csv").exists()


def test_optimize(capsys):
    code, out, _ = run(capsys, "optimize", "--n-min", "1", "--n-max", "1", "--n-points", "1", "--gains", "1,10")
    assert code == 0
    rows = rows_of(out)
    assert {r["scheme"] for r in rows} == {"1d_sq_1", "1d_sq_2", "epr_disp_2", "epr_conj_2", "dense_coding"}
    for r in rows:
        assert float(r["variance"]) == pytest.approx(float(r["formula_variance"]), rel=1e-6)
        assert float(r["mi_bits"]) == pytest.approx(float(r["mi_formula_bits"]), abs=1e-9)


def test_verify_default_passes(capsys):
    code, out, _ = run(capsys, "verify", "--threads", "2")
    assert code == 0, out
    assert out.strip().endswith("10/10 checks passed")


def test_verify_tight_tolerance_fails(capsys):
    code, out, _ = run(capsys, "verify", "--tolerance", "1e-15", "--samples", "20000")
    assert code == 2
    line = next(l for l in out.splitlines() if "engine vs closed form" in l)
    assert line.startswith("FAIL") and "max diff" in line


def test_verify_corrupted_convention(capsys):
    code, out, _ = run(capsys, "verify", "--corrupt-convention", "--samples", "20000")
    assert code == 2
    line = next(l for l in out.splitlines() if "physicality" in l)
    assert line.startswith("FAIL") and "unphysical" in line
