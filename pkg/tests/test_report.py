from __future__ import annotations

import json

import pytest

from oracles import load
from vessiot import __version__
from vessiot.report import ReportDocument, serialize_report
from vessiot.singular import SingularityClass, real_singularities


def doc(name: str, **kw) -> ReportDocument:
    return ReportDocument.from_analysis(real_singularities(load(name)), {"file": f"{name}.sys"}, **kw)


def test_json_roundtrip_and_determinism():
    d = doc("lh2")
    text = d.to_json()
    assert ReportDocument.from_json(text) == d
    assert doc("lh2").to_json() == text
    data = json.loads(text)
    assert sorted(data) == ["backend", "cases", "input", "matrix", "tool", "warnings"]
    assert data["tool"] == {"name": "vessiot", "version": __version__}
    assert sorted(data["cases"][0]) == [
        "class",
        "clauses",
        "parameter_condition",
        "solution",
        "verification",
        "vessiot_dim",
    ]
    assert [len(c["clauses"]) for c in data["cases"]] == [1, 2, 4]


def test_gather_document():
    d = doc("gather")
    assert d.classes() == [
        SingularityClass.REGULAR,
        SingularityClass.REGULAR_SINGULAR,
        SingularityClass.IRREGULAR_SINGULAR,
    ]
    data = d.to_dict()
    assert data["input"]["params"] == ["chi"]
    assert data["matrix"] == {"unknowns": ["b", "a"], "rows": [["u*chi + 3*u'^2", "u'^2*chi - 1"]]}
    assert data["cases"][2]["parameter_condition"] == "chi > 0"
    assert data["cases"][2]["clauses"] == [["u*chi + 3*u'^2 = 0", "u'^2*chi - 1 = 0", "u*u'*chi + u'^3 - t = 0", "chi > 0"]]


def test_text_rendering():
    text = doc("sphere").to_text()
    assert "case 1: regular (Vessiot dimension 1)" in text
    assert "case 2: regular singular (Vessiot dimension 1)" in text
    assert "case 3: irregular singular (Vessiot dimension 2)" in text
    assert "    t = 0 and u' = 0 and u - 1 = 0\n    or t = 0 and u' = 0 and u + 1 = 0\n" in text
    assert "    b = -(u*u' + t)/u'*r1\n    a = r1\n" in text
    assert "time " not in text


def test_timings_only_on_request():
    assert "timings" not in doc("sphere").to_dict()
    d = doc("sphere", timings=True)
    assert sorted(d.to_dict()["timings"]) == ["elimination", "pruning"]
    assert "time elimination:" in d.to_text()


def test_empty_report():
    d = ReportDocument(input={"funcs": ["u"], "params": [], "order": 1, "equations": [], "inequalities": [], "options": {}},
                       backend="internal", matrix={"unknowns": [], "rows": []}, cases=[])
    assert ReportDocument.from_json(d.to_json()) == d
    assert "cases: 0" in d.to_text()


def test_serialize_report_formats():
    d = doc("sphere")
    assert serialize_report(d, "json") == d.to_json()
    assert serialize_report(d, "text") == d.to_text()
    with pytest.raises(ValueError):
        serialize_report(d, "xml")
