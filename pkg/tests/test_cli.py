import json

import pytest

from curvedirac.bundled import CORPUS_NAMES, load_corpus
from curvedirac.cli import main, parse_point
from curvedirac.errors import InputError
from curvedirac.report import Check, Report

from conftest import SCHWARZSCHILD_TEXT

BAD_SYNTAX = SCHWARZSCHILD_TEXT.replace("g[t][t] = 1 - 2*M/r", "g[t][t] = 1 - 2*M/")
DUPLICATE_SECTION = SCHWARZSCHILD_TEXT + "\n[metric]\n"
NO_METRIC = "[header]\nname = empty\ncoords = t, x\nsignature = +-\n"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out) if out else None, err


def test_corpus_listing(capsys):
    code, rep, _ = run_json(capsys, "corpus")
    assert code == 0
    assert list(rep["payload"]["metrics"]) == list(CORPUS_NAMES)


def test_curvature_minkowski_all_zero(capsys):
    code, rep, _ = run_json(capsys, "curvature", "corpus:minkowski")
    assert code == 0
    p = rep["payload"]
    assert p["christoffel"] == p["riemann"] == p["ricci"] == p["einstein"] == {}
    assert p["scalar"] == "0"
    assert all(c["passed"] for c in rep["checks"])


def test_curvature_at_point(capsys):
    code, rep, _ = run_json(capsys, "curvature", "corpus:sphere2", "--at", "theta=0.7853981633974483,phi=0")
    assert code == 0
    vals = rep["payload"]["values"]
    assert vals["scalar"] == pytest.approx(2.0)
    assert vals["christoffel"]["0,1,1"] == pytest.approx(-0.5)
    assert rep["payload"]["riemann"]["0,1,0,1"] == "sin(theta)^2"


def test_einstein_check_schwarzschild(capsys):
    code, out, _ = run(capsys, "einstein-check", "corpus:schwarzschild")
    assert code == 0
    assert "classification: vacuum" in out
    assert "PASS  field-equation-residual" in out


def test_einstein_check_desitter(capsys):
    code, rep, _ = run_json(capsys, "einstein-check", "corpus:desitter-like")
    assert code == 1
    assert rep["payload"]["classification"] == "inconsistent"
    code, rep, _ = run_json(capsys, "einstein-check", "corpus:desitter-like", "--induced-matter")
    assert code == 0
    assert rep["payload"]["classification"] == "matter-consistent"
    assert rep["payload"]["residual"] == {}


def test_dirac_op_sphere_modes(capsys):
    code_d, direct, _ = run_json(capsys, "dirac-op", "corpus:sphere2", "--mode", "direct")
    code_p, paper, _ = run_json(capsys, "dirac-op", "corpus:sphere2", "--mode", "paper")
    assert code_d == code_p == 0
    assert direct["payload"]["potential"][0][0] == "1"
    assert paper["payload"]["potential"][0][0] == "1/2"
    for rep in (direct, paper):
        check = {c["name"]: c for c in rep["checks"]}["curvature-term-modes-agree"]
        assert check["passed"] is False and check["informational"] is True
        assert check["worst_error"] == pytest.approx(0.5)
        assert "differ" in check["note"]


def test_dirac_op_apply(capsys, tmp_path):
    path = tmp_path / "wave.field"
    path.write_text("psi[0] = exp(-i*(5*t - 3*x))\npsi[1] = 0\npsi[2] = 0\npsi[3] = 0\n", encoding="utf-8")
    code, rep, _ = run_json(capsys, "dirac-op", "corpus:minkowski", "--apply", str(path), "--at", "t=0.1,x=0.2,y=0,z=0")
    assert code == 0
    assert rep["payload"]["applied"] == ["-16*exp(-5*t*i + 3*x*i)", "0", "0", "0"]
    assert rep["payload"]["applied_at"]["values"][1] == 0.0


def test_dirac_op_matter_requires_T(capsys):
    code, _, err = run(capsys, "dirac-op", "corpus:desitter-like", "--matter")
    assert code == 2
    assert "stress-energy" in err


def test_dirac_op_induced_matter(capsys):
    code, rep, _ = run_json(capsys, "dirac-op", "corpus:desitter-like", "--induced-matter")
    assert code == 0
    assert rep["payload"]["operator_mode"] == "matter"
    assert rep["payload"]["potential"][0][0] == "1 + 3*H^2"


def test_tetrad_and_gammas_text(capsys):
    code, out, _ = run(capsys, "tetrad", "corpus:schwarzschild")
    assert code == 0 and "sqrt(1 - 2*M/r)" in out
    code, out, _ = run(capsys, "gammas", "corpus:schwarzschild")
    assert code == 0
    assert "PASS  clifford-anticommutator" in out


def test_non_diagonal_tetrad(capsys, tmp_path):
    text = SCHWARZSCHILD_TEXT.replace("g[phi][phi] = -r^2*sin(theta)^2", "g[phi][phi] = -r^2*sin(theta)^2\ng[t][phi] = 1/10")
    path = tmp_path / "tilted.metric"
    path.write_text(text, encoding="utf-8")
    code, rep, _ = run_json(capsys, "tetrad", str(path), "--at", "t=0,r=5,theta=1,phi=0")
    assert code == 0
    assert len(rep["payload"]["V"]) == 4
    code, rep, _ = run_json(capsys, "gammas", str(path))
    assert code == 0


def test_verify_table(capsys):
    code, out, _ = run(capsys, "verify", "corpus:sphere2")
    assert code == 0
    assert "oracle-commutator-identity" in out
    assert "FAIL" not in out


@pytest.mark.parametrize("command", ["curvature", "tetrad", "gammas", "dirac-op", "einstein-check", "verify"])
@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_exit_code_matrix(capsys, command, name):
    code, rep, _ = run_json(capsys, command, f"corpus:{name}")
    expected = 1 if (command, name) == ("einstein-check", "desitter-like") else 0
    assert code == expected
    assert rep["command"] == command and rep["spec_name"] == name


@pytest.mark.parametrize("command", ["curvature", "dirac-op", "verify"])
def test_json_round_trips_through_report(capsys, command):
    _, out, _ = run(capsys, command, "corpus:schwarzschild", "--json")
    rep = Report.from_json(out)
    assert rep.to_json() == out.rstrip("\n")
    assert all(isinstance(c, Check) for c in rep.checks)


def test_output_is_deterministic(capsys):
    first = run(capsys, "curvature", "corpus:schwarzschild", "--json")[1]
    second = run(capsys, "curvature", "corpus:schwarzschild", "--json")[1]
    assert first == second
    keys = list(json.loads(first)["payload"]["christoffel"])
    assert keys == sorted(keys, key=lambda k: tuple(map(int, k.split(","))))


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["curvature"],
        ["curvature", "corpus:minkowski", "--frobnicate"],
        ["dirac-op", "corpus:minkowski", "--mode", "literal"],
        ["curvature", "corpus:kerr"],
        ["curvature", "/no/such/file.metric"],
        ["curvature", "corpus:minkowski", "--at", "t=1"],
        ["curvature", "corpus:minkowski", "--at", "w=1,t=0,x=0,y=0,z=0"],
    ],
)
def test_usage_and_input_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


@pytest.mark.parametrize("text,error", [(BAD_SYNTAX, "expected"), (NO_METRIC, "metric"), (DUPLICATE_SECTION, "")])
def test_bad_metric_files_exit_2(capsys, tmp_path, text, error):
    path = tmp_path / "bad.metric"
    path.write_text(text, encoding="utf-8")
    code, _, err = run(capsys, "curvature", str(path))
    assert code == 2
    assert error in err


def test_asymmetric_file_exit_2(capsys, tmp_path):
    text = SCHWARZSCHILD_TEXT + "\n[stress-energy]\nT[t][r] = r\nT[r][t] = 2*r\n"
    path = tmp_path / "asym.metric"
    path.write_text(text, encoding="utf-8")
    code, _, err = run(capsys, "einstein-check", str(path))
    assert code == 2
    assert "T[r][t]" in err or "asymmetric" in err.lower()


def test_parse_point():
    spec = load_corpus("sphere2")
    assert parse_point("theta=1, phi=2.5", spec) == {"theta": 1.0, "phi": 2.5}
    with pytest.raises(InputError):
        parse_point("theta=abc,phi=1", spec)
    with pytest.raises(InputError):
        parse_point("theta", spec)


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "curvature" in capsys.readouterr().out
