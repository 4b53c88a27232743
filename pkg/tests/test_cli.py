import json
import subprocess
import sys

import pytest

from formkit.cli import EXIT_INVARIANT, EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, main

from helpers import FIXTURES

GOLDEN = FIXTURES.parent / "golden"


def run(capsys, *argv, environ=None):
    code = main([str(a) for a in argv], environ={} if environ is None else environ)
    out = capsys.readouterr()
    return code, out.out, out.err


def report(out):
    return dict(line.split("=", 1) for line in out.splitlines())


GOLDEN_RUNS = {
    "inspect_f1.txt": ["inspect", FIXTURES / "f1_form.json"],
    "decompose_identity.txt": [
        "decompose",
        FIXTURES / "identity_form.json",
        "--contraction",
        FIXTURES / "k_projection.json",
    ],
    "limit_affine.txt": ["limit", FIXTURES / "affine_sequence.json", "--lambda", "-1", "--n-max", "50"],
}


@pytest.mark.parametrize("name", sorted(GOLDEN_RUNS))
def test_golden_reports(name, capsys, tmp_path):
    argv = list(GOLDEN_RUNS[name])
    if argv[0] == "decompose":
        argv += ["--out", tmp_path]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == second[0] == EXIT_OK
    assert first[1] == second[1]
    assert first[1] == (GOLDEN / name).read_text()


class TestInspect:
    def test_f1(self, capsys):
        code, out, _ = run(capsys, "inspect", FIXTURES / "f1_form.json")
        rep = report(out)
        assert code == EXIT_OK
        assert (rep["m(t)"], rep["dom dim"], rep["closable"], rep["singular"]) == ("2", "1", "true", "false")

    def test_zero_form(self, capsys):
        code, out, _ = run(capsys, "inspect", FIXTURES / "zero_form.json")
        assert code == EXIT_OK and report(out)["singular"] == "true"

    def test_malformed(self, capsys):
        code, _, err = run(capsys, "inspect", FIXTURES / "malformed.json")
        assert code == EXIT_PARSE and "invalid JSON" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "inspect", tmp_path / "nope.json")[0] == EXIT_PARSE

    def test_non_hermitian(self, capsys):
        code, _, err = run(capsys, "inspect", FIXTURES / "nonhermitian_form.json")
        assert code == EXIT_INVARIANT and "Hermitian" in err


class TestDecompose:
    def test_contraction_writes_files(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "decompose", FIXTURES / "identity_form.json", "--contraction", FIXTURES / "k_projection.json",
            "--out", tmp_path,
        )
        assert code == EXIT_OK
        assert report(out)["mutually_singular"] == "true"
        t1 = json.loads((tmp_path / "t1.json").read_text())
        t2 = json.loads((tmp_path / "t2.json").read_text())
        assert t1["matrix"] == [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]
        assert t2["matrix"] == [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]
        assert (tmp_path / "k.json").exists()

    def test_lebesgue_on_f1(self, capsys, tmp_path):
        code, out, _ = run(capsys, "decompose", FIXTURES / "f1_form.json", "--lebesgue", "--out", tmp_path)
        rep = report(out)
        assert code == EXIT_OK
        assert rep["t2 matrix"] == "[[0]]"
        assert "certificate" in rep

    def test_contraction_too_big(self, capsys, tmp_path):
        code, _, _ = run(
            capsys, "decompose", FIXTURES / "identity_form.json", "--contraction", FIXTURES / "k_too_big.json",
            "--out", tmp_path,
        )
        assert code == EXIT_INVARIANT

    def test_shift_not_a_lower_bound(self, capsys, tmp_path):
        code, _, err = run(capsys, "decompose", FIXTURES / "f1_form.json", "--lebesgue", "--c", "3", "--out", tmp_path)
        assert code == EXIT_PRECONDITION and "lower bound" in err

    def test_needs_a_method(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["decompose", str(FIXTURES / "f1_form.json")], environ={})
        assert exc.value.code == EXIT_PARSE


class TestOtherCommands:
    def test_represent(self, capsys, tmp_path):
        out_file = tmp_path / "rel.json"
        code, out, _ = run(capsys, "represent", FIXTURES / "f1_form.json", "--out", out_file)
        rep = report(out)
        assert code == EXIT_OK
        assert (rep["mul dim"], rep["lower bound"]) == ("1", "2")
        assert json.loads(out_file.read_text())["kind"] == "relation"

    def test_parallel(self, capsys):
        code, out, _ = run(capsys, "parallel", FIXTURES / "diag_10.json", FIXTURES / "diag_01.json")
        rep = report(out)
        assert code == EXIT_OK
        assert rep["matrix"] == "[[0, 0], [0, 0]]"
        assert float(rep["residual"]) <= 1e-10

    def test_limit_affine(self, capsys):
        code, out, _ = run(capsys, "limit", FIXTURES / "affine_sequence.json", "--lambda", "-1", "--n-max", "50")
        rep = report(out)
        assert code == EXIT_OK
        assert abs(float(rep["final error"]) - 1 / 52) <= 1e-9
        assert 0.9 <= float(rep["exponent"]) <= 1.1

    def test_limit_growing_chain(self, capsys):
        code, out, _ = run(capsys, "limit", FIXTURES / "growing_chain.json")
        rep = report(out)
        assert code == EXIT_OK
        assert rep["equals_t_inf"] == rep["closure_of_regular_is_t_inf"] == "true"

    def test_limit_bad_point(self, capsys):
        code, _, _ = run(capsys, "limit", FIXTURES / "affine_sequence.json", "--lambda", "5")
        assert code == EXIT_PRECONDITION


class TestTolerances:
    def test_env_override(self, capsys):
        code, _, _ = run(capsys, "inspect", FIXTURES / "f1_form.json", environ={"FORMKIT_TOL_OVERRIDE": "rank=1e-10,eq=1e-6"})
        assert code == EXIT_OK

    def test_bad_env_override(self, capsys):
        code, _, _ = run(capsys, "inspect", FIXTURES / "f1_form.json", environ={"FORMKIT_TOL_OVERRIDE": "speed=3"})
        assert code == EXIT_PARSE

    def test_bad_flag_value(self, capsys):
        code, _, _ = run(capsys, "--tol-eq", "-1", "inspect", FIXTURES / "f1_form.json")
        assert code == EXIT_PARSE

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"], environ={})
        assert exc.value.code == EXIT_PARSE


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "formkit", "inspect", str(FIXTURES / "f1_form.json")],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == EXIT_OK
    assert proc.stdout == (GOLDEN / "inspect_f1.txt").read_text()
