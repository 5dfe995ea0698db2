from __future__ import annotations

import csv
import io
import json

import pytest

from ordkit.cli import SCHEMA, run


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compare_examples(capsys):
    assert _run(capsys, "compare", "--group", "b3", "--order", "dd", "a", "b") == (0, "a < b\n", "")
    assert _run(capsys, "compare", "--group", "b3", "--order", "dd", "a", "a")[1] == "a = a\n"
    assert _run(capsys, "compare", "--group", "b3", "--order", "dd", "e", "a")[1] == "e < a\n"


def test_rot_no_lift_is_a_domain_error(capsys):
    code, out, err = _run(capsys, "rot", "--k", "6")
    assert code == 1 and out == ""
    blob = json.loads(err)
    assert blob["schema"] == SCHEMA and blob["error"] == "NoLift"


def test_rot_k5(capsys):
    code, out, _ = _run(capsys, "rot", "--k", "5", "--element", "al.be")
    assert code == 0
    assert json.loads(out)["rot"] == {"num": 1, "den": 5}


def test_usage_error_exit_2(capsys):
    assert run(["compare"]) == 2
    assert run(["nonsense"]) == 2
    capsys.readouterr()


def test_psl_has_no_left_order(capsys):
    code, _, err = _run(capsys, "compare", "--group", "psl2z", "al", "be")
    assert code == 1 and json.loads(err)["error"] == "DomainError"


def test_circular_json_round_trip_and_determinism(capsys, tmp_path):
    out = tmp_path / "config.json"
    assert run(["circular", "--rep", "deformed", "--ball", "3", "--out", str(out)]) == 0
    first = out.read_text()
    assert run(["circular", "--rep", "deformed", "--ball", "3", "--out", str(out)]) == 0
    assert out.read_text() == first
    blob = json.loads(first)
    entries = blob["cyclic_order"]
    assert len(entries) == 14
    assert all("word" in e and "point" in e for e in entries)
    assert json.loads(json.dumps(blob)) == blob


def test_realize_csv(capsys, tmp_path):
    svg = tmp_path / "orbit.svg"
    code, out, _ = _run(capsys, "realize", "--group", "b3", "--order", "dd", "-n", "50", "--svg", str(svg))
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["index", "word", "numerator", "exponent"]
    assert len(rows) == 51 and rows[1][2:] == ["0", "0"]
    assert svg.read_text().startswith("<svg")


def test_klein_cones(capsys):
    code, out, _ = _run(capsys, "cones", "--group", "klein", "--radius", "3", "--require", "x,y")
    assert code == 0
    blob = json.loads(out)
    assert blob["radius"] == 3 and len(blob["survivors"]) == 1
    code, out, _ = _run(capsys, "cones", "--group", "klein", "--radius", "3")
    assert len(json.loads(out)["survivors"]) == 4


def test_pingpong_and_tararin(capsys):
    code, out, _ = _run(capsys, "pingpong", "--rep", "deformed")
    assert code == 0 and json.loads(out)["pass"] is True
    code, out, _ = _run(capsys, "pingpong", "--rep", "modular")
    blob = json.loads(out)
    assert code == 0 and blob["pass"] is False and blob["witness"]
    code, out, _ = _run(capsys, "tararin", "--group", "tararin2")
    blob = json.loads(out)
    assert blob["count"] == 8 and all(o["violations"] == 0 for o in blob["orders"])


@pytest.mark.parametrize("argv", [["lift", "t"], ["reconstruct", "--depth", "1"], ["svg-circle"],
                                  ["ball", "--group", "z2", "--radius", "2"],
                                  ["isolation", "--group", "b3", "--alphabet", "yYzZ", "--require", "y,z", "--radius", "2"]])
def test_other_commands_are_deterministic(capsys, argv):
    code, out1, _ = _run(capsys, *argv)
    assert code == 0
    assert _run(capsys, *argv)[1] == out1
