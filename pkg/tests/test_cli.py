from __future__ import annotations

import io
import json
import shutil
import subprocess
import sys

import pytest

from oracles import SYSTEMS
from vessiot.cli import EXIT_INPUT, EXIT_OK, main


def call(*argv: str, stdin: str | None = None) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        old = sys.stdin
        sys.stdin = io.StringIO(stdin)
    try:
        code = main(list(argv), out, err)
    finally:
        if stdin is not None:
            sys.stdin = old
    return code, out.getvalue(), err.getvalue()


def fixture(name: str) -> str:
    return str(SYSTEMS / f"{name}.sys")


def test_sphere_defaults():
    code, out, err = call(fixture("sphere"))
    assert code == EXIT_OK and err == ""
    assert "cases: 3" in out
    assert "case 2: regular singular" in out


def test_json_is_deterministic():
    a = call(fixture("lh1"), "--format", "json")[1]
    b = call(fixture("lh1"), "--format", "json")[1]
    assert a == b
    data = json.loads(a)
    assert [c["class"] for c in data["cases"]] == ["regular", "regular-singular", "irregular-singular"]
    assert "timings" not in data
    assert data["input"]["options"] == {"backend": "internal", "prolong": None, "reduce": True, "rows": "top"}


def test_prolong_two():
    code, out, _ = call(fixture("lh1"), "--prolong", "2", "--reduce", "on", "--format", "json")
    assert code == EXIT_OK
    cases = json.loads(out)["cases"]
    assert len(cases) == 3
    pivot = "2*t*w*u'' - t*u'' + 2*w*u' - 2*u'"
    assert pivot + " != 0" in cases[1]["clauses"][0]
    assert pivot + " = 0" in cases[2]["clauses"][0]


def test_timings_flag():
    data = json.loads(call(fixture("sphere"), "--format", "json", "--timings")[1])
    assert set(data["timings"]) == {"elimination", "pruning"}


def test_stdin_and_output_file(tmp_path):
    target = tmp_path / "out.json"
    text = (SYSTEMS / "gather.sys").read_text()
    code, out, _ = call("-", "--format", "json", "-o", str(target), stdin=text)
    assert code == EXIT_OK and out == ""
    assert json.loads(target.read_text())["cases"][2]["parameter_condition"] == "chi > 0"


@pytest.mark.parametrize(
    "argv, message",
    [
        (["/nonexistent/system.sys"], "cannot read /nonexistent/system.sys"),
        (["--prolong", "0", "SPHERE"], "cannot prolong an order 1 system to order 0"),
        (["--solver", "/nonexistent/z3", "SPHERE"], "no usable solver at /nonexistent/z3"),
    ],
)
def test_input_errors(argv, message):
    argv = [fixture("sphere") if a == "SPHERE" else a for a in argv]
    code, out, err = call(*argv)
    assert code == EXIT_INPUT and out == ""
    assert err.startswith("vessiot: error: ") and message in err


def test_parse_error_position(tmp_path):
    bad = tmp_path / "bad.sys"
    bad.write_text("funcs: u\neq: u' + q\n")
    code, _, err = call(str(bad))
    assert code == EXIT_INPUT
    assert "line 2, column 10: undeclared identifier 'q'" in err


def test_usage_error_is_input_error():
    assert call("--format", "xml", fixture("sphere"))[0] == EXIT_INPUT


def test_warnings_go_to_stderr(tmp_path):
    f = tmp_path / "under.sys"
    f.write_text("funcs: u, v\neq: u' - v'\n")
    code, out, err = call(str(f))
    assert code == EXIT_OK
    assert "vessiot: warning: every case is irregular singular" in err
    assert "warning" in out


def test_external_backend():
    z3 = shutil.which("z3")
    if z3 is None:
        pytest.skip("z3 not installed")
    code, out, _ = call(fixture("sphere"), "--backend", "external", "--solver", z3, "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["backend"] == "external"
    assert len(data["cases"]) == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "vessiot", fixture("sphere")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "cases: 3" in proc.stdout
