import json

import pytest

from conftest import FIXTURES, pres
from gored.cli import main
from gored.presentation import parse_presentation
from gored.reduction import ReductionTrace


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_human(capsys):
    code, out, _ = run(capsys, "check", "ex46.alg")
    assert code == 0
    assert "dimension 14" in out
    assert "admissible: J^4 lies in I" in out
    assert out.startswith("# bound=20 seed=0")


def test_check_structured(capsys):
    code, out, _ = run(capsys, "check", "ex48.alg", "--format", "structured")
    data = json.loads(out)
    assert code == 0
    assert data["dimension"] == 27 and data["nilpotency"] == 6
    assert data["config"]["bound"] == 20


def test_field_flag(capsys):
    code, out, _ = run(capsys, "check", "ex46.alg", "--field", "GF32003")
    assert code == 0 and "over GF(32003)" in out


def test_input_errors_exit_1(capsys, tmp_path):
    assert run(capsys, "check", "bad.alg")[0] == 1
    assert run(capsys, "check", str(tmp_path / "missing.alg"))[0] == 1
    assert run(capsys, "check", "ex46.alg", "--field", "R")[0] == 1
    assert run(capsys, "ext", "loop-x2.alg", "--simple", "7", "--simple", "1")[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["check", "ex46.alg", "--bound", "0"])
    assert exc.value.code == 1


def test_bound_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("GORED_BOUND", "7")
    code, out, _ = run(capsys, "gorenstein", "loop-x2.alg", "--format", "structured")
    assert json.loads(out)["config"]["bound"] == 7
    code, out, _ = run(capsys, "gorenstein", "loop-x2.alg", "--bound", "9", "--format",
                       "structured")
    assert json.loads(out)["config"]["bound"] == 9


def test_gorenstein_command(capsys):
    code, out, _ = run(capsys, "gorenstein", "loop-x2.alg")
    assert code == 0
    assert "Gorenstein, (0,0)" in out
    code, out, _ = run(capsys, "gorenstein", "ex47C.alg")
    assert code == 0 and "not" in out.lower()


def test_gproj_command(capsys):
    code, out, _ = run(capsys, "gproj", "ex46.alg", "--simple", "4", "--simple", "1")
    assert code == 0
    assert "S4: CertifiedGproj" in out
    assert "S1: CertifiedNotGproj(Ext^1(M, A) != 0)" in out
    code, out, _ = run(capsys, "gproj", "loop-x3.alg", "--simple", "1", "--bound", "1")
    assert code == 2 and "Undetermined" in out


def test_gproj_module_file(capsys, tmp_path):
    f = tmp_path / "j2.mod"
    f.write_text("algebra loop-x3.alg\ndim 1 = 2\nmatrix x = [[0, 0], [1, 0]]\n")
    code, out, _ = run(capsys, "gproj", "loop-x3.alg", "--module", str(f))
    assert code == 0 and "j2.mod: CertifiedGproj" in out


def test_ext_command(capsys):
    code, out, _ = run(capsys, "ext", "loop-x3.alg", "--simple", "1", "--simple", "1",
                       "--jmax", "6", "--format", "structured")
    assert code == 0
    assert json.loads(out)["ext"] == [1] * 7
    assert run(capsys, "ext", "loop-x3.alg", "--simple", "1")[0] == 1


def test_reduce_command(capsys):
    code, out, _ = run(capsys, "reduce", "ex46.alg")
    assert code == 0
    assert "VertexRemoval {2,3} [Corollary 4.3]" in out
    assert "core self-injective" in out
    code, out, _ = run(capsys, "reduce", "ex47.alg", "--idempotent", "2,4", "--format",
                       "structured")
    data = json.loads(out)
    assert code == 0
    assert [s["kind"] for s in data["steps"]] == ["VertexRemoval", "IdempotentReduction"]
    assert data["seed"] == 0


def test_reduce_alarm_exit_code(capsys):
    code, out, _ = run(capsys, "reduce", "ex46.alg", "--jmax", "2")
    assert code == 3 and "FALSIFICATION ALARM" in out


def test_reduce_structured_round_trip(capsys):
    code, out, _ = run(capsys, "reduce", "ex48.alg", "--format", "structured")
    data = json.loads(out)
    data.pop("conjecture_report")
    data.pop("seed")
    trace = ReductionTrace(data)
    assert trace.verify_replay()
    assert trace.core == parse_presentation(data["core"]["algebra"])


@pytest.mark.parametrize("name", FIXTURES)
def test_structured_output_is_byte_identical(capsys, name):
    v = pres(name).quiver.vertices[0]
    commands = [["check"], ["gorenstein"], ["reduce"], ["gproj", "--simple", v],
                ["ext", "--simple", v, "--simple", v]]
    for cmd in commands:
        argv = [cmd[0], name + ".alg"] + cmd[1:] + ["--format", "structured", "--seed", "4"]
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first == second
        json.loads(first[1])
