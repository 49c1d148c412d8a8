import json
import os
import subprocess
import sys

import pytest

from conftest import DATA, PROBLEMS
from symrelax.cli import EXIT_INPUT, EXIT_OK, EXIT_REGIME, ProblemFile, main


def prob(name):
    return os.path.join(PROBLEMS, name)


def run_json(capsys, *argv):
    code = main([*argv, "--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_structure_n3(capsys):
    code = main(["structure", "--n", "3", "--k", "2", "--group", "sn"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "(3)                  4     1" in out
    assert "(2,1)                3     2" in out


def test_structure_cyclic(capsys):
    code, rep = run_json(capsys, "structure", "--n", "4", "--k", "1", "--group", "cn")
    assert code == EXIT_OK
    assert [b["size"] for b in rep["blocks"]] == [2, 1, 1, 1]
    assert rep["schema_version"] == 1


def test_structure_compare(capsys):
    code, rep = run_json(capsys, "structure", "--n", "40", "--k", "2", "--compare", "4")
    assert code == EXIT_OK and rep["compare"]["identical"]
    assert [b["size"] for b in rep["blocks"]] == [b["size"] for b in rep["compare"]["blocks"]]


def test_relax_routes_agree(capsys):
    values = []
    for route in ("symadapt", "dense", "orbit"):
        code, rep = run_json(capsys, "relax", prob("powersum32.toml"), "--route", route, "--k", "2")
        assert code == EXIT_OK, route
        values.append(rep["values"]["2"])
    assert max(values) - min(values) < 1e-5
    assert values[0] == pytest.approx(3, abs=1e-6)


def test_relax_export_golden(tmp_path, capsys):
    out = tmp_path / "p.dat-s"
    code = main(["relax", prob("powersum32.toml"), "--route", "symadapt", "--k", "2", "--export", str(out)])
    capsys.readouterr()
    assert code == EXIT_OK
    with open(os.path.join(DATA, "powersum_n3_k2_symadapt.dat-s"), encoding="ascii") as fh:
        assert out.read_text() == fh.read()


def test_relax_order_too_small(capsys):
    code = main(["relax", prob("powersum32.toml"), "--route", "orbit", "--k", "1"])
    err = capsys.readouterr().err
    assert code == EXIT_INPUT and "k0=2" in err


def test_invariance_error(capsys):
    code = main(["relax", prob("not_symmetric.toml")])
    assert code == EXIT_REGIME
    assert "not sn-invariant" in capsys.readouterr().err
    assert main(["reduce", prob("not_symmetric.toml")]) == EXIT_REGIME


def test_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('n = 2\nobjective = "x1 +* x2"\n')
    assert main(["relax", str(bad)]) == EXIT_INPUT
    bad.write_text("n = [\n")
    assert main(["relax", str(bad)]) == EXIT_INPUT
    assert main(["relax", str(tmp_path / "missing.toml")]) == EXIT_INPUT
    capsys.readouterr()


def test_reduce_choi_lam(capsys):
    code, rep = run_json(capsys, "reduce", prob("choi_lam.toml"))
    assert code == EXIT_OK
    assert rep["r"] == 2 and len(rep["omegas"]) == 2
    assert rep["value"] == pytest.approx(0, abs=1e-6)


def test_check_nonneg4(capsys):
    code = main(["check-nonneg4", prob("choi_lam.toml")])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "certified nonnegative (2 SOS certificates)" in out


def test_powersum(capsys):
    code, rep = run_json(capsys, "powersum", "--n", "3", "--m", "2", "--q", "2", "--gamma", "3")
    assert code == EXIT_OK
    assert rep["L"]["value"] == pytest.approx(3, abs=1e-6)
    assert rep["closed_form_lower"] == 3
    assert rep["U"]["value"] == pytest.approx(4.5, abs=1e-6)
    assert sum(rep["point"]) == pytest.approx(3, abs=1e-6)
    assert rep["sandwich"] is True


def test_powersum_zero(capsys):
    code, rep = run_json(capsys, "powersum", "--n", "3", "--q", "2", "--gamma", "0")
    assert code == EXIT_OK
    assert rep["L"]["value"] == pytest.approx(0, abs=1e-6)
    assert rep["U"]["value"] == pytest.approx(0, abs=1e-6)


def test_powersum_regime_error(capsys):
    code = main(["powersum", "--n", "2", "--m", "4", "--q", "4", "--gamma", "1", "2", "3"])
    assert code == EXIT_REGIME
    assert "outside both regimes" in capsys.readouterr().err


def test_json_reports_are_reproducible(capsys):
    argv = ["relax", prob("ball_quartic.toml"), "--order", "2", "--order", "3", "--json"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_problem_file_schema():
    p = ProblemFile.load(prob("powersum32.toml"))
    assert p.n == 3 and p.symmetry == "sn"
    assert [c.kind for c in p.constraints] == ["eq0"]


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "symrelax.cli", "structure", "--n", "3", "--k", "1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "moment variables: 3" in res.stdout
