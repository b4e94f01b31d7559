from __future__ import annotations

import os
import stat

import pytest

from qelim_corpus import body
from vessiot.formula import Dnf
from vessiot.smtlib import SOLVER_ENV, ExportError, SolverConfig, export_smtlib, find_solver, run_solver, symbol
from vessiot.parsing import name_table

N = name_table(("u", "v"))


def test_symbols():
    assert symbol(N["u"]) == "u"
    assert symbol(N["u"].with_order(1)) == "|u'|"


def test_export_is_deterministic():
    b = body("u'^2 + u^2 + t^2 - 1 = 0 and u' != 0")
    script = export_smtlib(sorted(b.variables()), b)
    assert script == export_smtlib(sorted(b.variables()), b)
    assert script.splitlines() == [
        "(set-logic QF_NRA)",
        "(declare-const t Real)",
        "(declare-const u Real)",
        "(declare-const |u'| Real)",
        "(assert (= (- (+ (* |u'| |u'|) (* u u) (* t t)) 1) 0))",
        "(assert (not (= |u'| 0)))",
        "(check-sat)",
        "(exit)",
    ]


def test_export_disjunction_and_false():
    b = body("u - 1/2 = 0 or v > 0 and u < 0")
    assert "(assert (or " in export_smtlib((), b)
    assert "(assert false)" in export_smtlib((), Dnf.false())


def test_export_rejects_free_parameters():
    with pytest.raises(ExportError):
        export_smtlib((N["u"],), body("u - v = 0"), free=(N["v"],))


def fake_solver(tmp_path, answer: str) -> SolverConfig:
    path = tmp_path / "solver"
    path.write_text(f"#!/bin/sh\necho {answer}\n")
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return SolverConfig(str(path), timeout=5)


def test_run_solver_parses_answer(tmp_path):
    assert run_solver("(check-sat)\n", fake_solver(tmp_path, "unsat")) == "unsat"
    assert run_solver("(check-sat)\n", fake_solver(tmp_path, "garbage")) == "unknown"
    assert run_solver("(check-sat)\n", SolverConfig(str(tmp_path / "missing"))) == "unknown"


def test_find_solver(tmp_path, monkeypatch):
    cfg = fake_solver(tmp_path, "sat")
    monkeypatch.delenv(SOLVER_ENV, raising=False)
    assert find_solver() is None
    assert find_solver(str(tmp_path / "missing")) is None
    monkeypatch.setenv(SOLVER_ENV, cfg.path)
    found = find_solver(timeout=3)
    assert found == SolverConfig(cfg.path, 3)
    assert found.name == os.path.basename(cfg.path)
