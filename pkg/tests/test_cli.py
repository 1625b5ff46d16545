import json
import subprocess
import sys

import pytest

from stmilnor import dickson, format_poly, l_poly
from stmilnor.cli import run


def _out(capsys):
    cap = capsys.readouterr()
    return cap.out.strip(), cap.err.strip()


def test_apply_named_constant(capsys):
    assert run(["apply", "St(0,1)", "L2", "-p", "3"]) == 0
    out, err = _out(capsys)
    want = -(l_poly(2, 2, 3) * dickson(2, 0, 3))
    assert out == format_poly(want)
    assert not err


def test_apply_exterior_op(capsys):
    assert run(["apply", "St{S=(0);R=()}", "x1*x2"]) == 0
    out, _ = _out(capsys)
    assert out == "x2*y1 - x1*y2"


def test_apply_json(capsys):
    assert run(["apply", "St(0,0)", "y1", "--format", "json"]) == 0
    out, _ = _out(capsys)
    assert json.loads(out) == {"n": 2, "p": 3, "terms": [{"c": 1, "exps": [1, 0], "ext": []}]}


def test_dickson_output(capsys):
    assert run(["dickson", "-s", "0", "-p", "3"]) == 0
    out, _ = _out(capsys)
    assert out == "y1^6*y2^2 + y1^4*y2^4 + y1^2*y2^6"


def test_bracket_output(capsys):
    assert run(["bracket", "-k", "1", "--exps", "0"]) == 0
    out, _ = _out(capsys)
    assert out == "-x2*y1 + x1*y2"


def test_bracket_default_is_constant_free(capsys):
    # k=0 with no exponents needs n=0 rows; reject instead of guessing
    assert run(["bracket", "-k", "0", "--exps", ""]) == 1
    _, err = _out(capsys)
    assert err.startswith("error:")


def test_verify_text_reports_mismatches(capsys):
    assert run(["verify", "-p", "3", "T33"]) == 0
    out, _ = _out(capsys)
    assert "T33-iii: 12/13 pass, 1 boundary-mismatch" in out
    assert "BOUNDARY-MISMATCH T33-iii[p=3,j=7]" in out
    assert "engine:" in out and "formula:" in out
    assert "2 boundary-mismatch (engine value stands)" in out
    assert "FAIL" not in out.replace("BOUNDARY-MISMATCH", "")


def test_verify_family_group_expansion(capsys):
    assert run(["verify", "-p", "3", "P31", "T32"]) == 0
    out, _ = _out(capsys)
    for fam in ("P31-Q0", "P31-Q1", "T32-Q0", "T32-Q1"):
        assert f"{fam}:" in out
    assert "boundary-mismatch" not in out


def test_verify_json_round_trip(capsys):
    assert run(["verify", "-p", "3", "--format", "json", "T33-v"]) == 0
    out, _ = _out(capsys)
    payload = json.loads(out)
    statuses = [row["status"] for row in payload]
    assert statuses == ["pass", "pass", "boundary-mismatch"]
    assert all("ms" not in row for row in payload)


def test_verify_timings_flag(capsys):
    assert run(["verify", "-p", "3", "--format", "json", "--timings", "T33-ii"]) == 0
    out, _ = _out(capsys)
    assert all("ms" in row for row in json.loads(out))


def test_table_json(capsys):
    assert run(["table", "--target", "L2", "-p", "3", "--format", "json"]) == 0
    out, _ = _out(capsys)
    rows = json.loads(out)
    assert len(rows) == 7
    cells = {(row["i"], row["j"]) for row in rows}
    assert cells == {(0, 0), (0, 1), (0, 3), (0, 4), (1, 3), (3, 0), (4, 0)}
    by_cell = {(row["i"], row["j"]): row["pretty"] for row in rows}
    assert by_cell[(0, 0)] == "L2"
    assert by_cell[(0, 1)] == "-L2*Q20"
    assert by_cell[(1, 3)] == "L2*Q20*Q21^3"


def test_table_text(capsys):
    assert run(["table", "--target", "Q21", "-p", "3", "--max", "5"]) == 0
    out, _ = _out(capsys)
    assert out.startswith("St(i,j) on Q21, p=3")


def test_error_paths(capsys):
    assert run(["apply", "St(0,0)", "y1 + @"]) == 1
    _, err = _out(capsys)
    assert err.startswith("error:")
    assert run(["apply", "not-an-op", "y1"]) == 1
    assert run(["dickson", "-s", "5", "-p", "3"]) == 1
    assert run(["verify", "-p", "4"]) == 1
    assert run(["verify", "NOPE"]) == 1


def test_closed_stdout_pipe_is_quiet():
    # large json piped into a reader that hangs up early must not traceback
    cmd = (f"{sys.executable} -m stmilnor verify -p 3 --format json all"
           " | head -c 64 > /dev/null")
    proc = subprocess.run(["sh", "-c", cmd], capture_output=True, text=True)
    assert "Traceback" not in proc.stderr


def test_usage_errors_exit_two():
    with pytest.raises(SystemExit) as ei:
        run(["frobnicate"])
    assert ei.value.code == 2
    with pytest.raises(SystemExit):
        run(["dickson"])  # -s is required
