"""Machine and human readable reports of a singularity analysis.

The JSON document has the keys

``tool``
    ``{"name", "version"}``
``input``
    ``{"funcs", "params", "order", "equations", "inequalities", "options"}``;
    equations and inequalities in the text syntax of :mod:`vessiot.parsing`
``backend``
    ``"internal"`` or ``"external"``: who decided the pruning queries
``matrix``
    ``{"unknowns", "rows"}`` with entries as polynomial text
``cases``
    list of ``{"class", "vessiot_dim", "clauses", "solution",
    "parameter_condition", "verification"}``.  ``clauses`` is the guard in
    DNF as a list of lists of atom strings ``"p rel 0"``; ``solution`` is a
    list of ``"x = value"`` strings; ``parameter_condition`` is a DNF string
    or ``null``
``warnings``
    list of strings
``timings``
    only present when requested, seconds per phase

Output is deterministic: keys are sorted and the case order is the order in
which the elimination emitted the cases.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

from . import __version__
from .formula import Dnf
from .poly import format_poly
from .singular import Analysis, CaseReport, SingularityClass


@dataclass(frozen=True)
class CaseEntry:
    cls: str
    vessiot_dim: int
    clauses: list[list[str]]
    solution: list[str]
    parameter_condition: str | None
    verification: str

    @classmethod
    def of(cls, r: CaseReport) -> CaseEntry:
        return cls(
            cls=r.cls.value,
            vessiot_dim=r.vessiot_dim,
            clauses=_clauses(r.guard),
            solution=r.solution.equations(),
            parameter_condition=None if r.parameter_condition is None else str(r.parameter_condition),
            verification=r.verification,
        )

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["class"] = d.pop("cls")
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> CaseEntry:
        d = dict(d)
        d["cls"] = d.pop("class")
        return cls(**d)


def _clauses(d: Dnf) -> list[list[str]]:
    return [[str(a) for a in g.atoms] for g in d.clauses]


@dataclass(frozen=True)
class ReportDocument:
    input: dict[str, Any]
    backend: str
    matrix: dict[str, Any]
    cases: list[CaseEntry]
    warnings: list[str] = field(default_factory=list)
    tool: dict[str, str] = field(default_factory=lambda: {"name": "vessiot", "version": __version__})
    timings: dict[str, float] | None = None

    @classmethod
    def from_analysis(cls, an: Analysis, options: dict[str, Any] | None = None, timings: bool = False) -> ReportDocument:
        sys = an.system
        inp = {
            "funcs": list(sys.funcs),
            "params": list(sys.params),
            "order": sys.order,
            "equations": [format_poly(p) for p in sys.equations],
            "inequalities": [str(a) for a in sys.inequalities],
            "options": dict(options or {}),
        }
        matrix = {
            "unknowns": list(an.matrix.unknowns),
            "rows": [[format_poly(e) for e in row] for row in an.matrix.entries],
        }
        return cls(
            input=inp,
            backend=an.backend,
            matrix=matrix,
            cases=[CaseEntry.of(r) for r in an.reports],
            warnings=list(an.warnings),
            timings={k: round(v, 6) for k, v in an.timings.items()} if timings else None,
        )

    def classes(self) -> list[SingularityClass]:
        return [SingularityClass(c.cls) for c in self.cases]

    def to_dict(self) -> dict[str, Any]:
        d = {
            "tool": dict(self.tool),
            "input": self.input,
            "backend": self.backend,
            "matrix": self.matrix,
            "cases": [c.to_dict() for c in self.cases],
            "warnings": list(self.warnings),
        }
        if self.timings is not None:
            d["timings"] = dict(self.timings)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ReportDocument:
        return cls(
            input=d["input"],
            backend=d["backend"],
            matrix=d["matrix"],
            cases=[CaseEntry.from_dict(c) for c in d["cases"]],
            warnings=list(d.get("warnings", [])),
            tool=dict(d["tool"]),
            timings=d.get("timings"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ReportDocument:
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        inp = self.input
        out = [f"functions: {', '.join(inp['funcs'])}"]
        if inp["params"]:
            out.append(f"parameters: {', '.join(inp['params'])}")
        out.append(f"order: {inp['order']}")
        out.append("equations:")
        out += [f"  {e} = 0" for e in inp["equations"]]
        if inp["inequalities"]:
            out.append("inequalities:")
            out += [f"  {a}" for a in inp["inequalities"]]
        out.append(f"backend: {self.backend}")
        out.append(f"cases: {len(self.cases)}")
        for i, c in enumerate(self.cases, start=1):
            label = SingularityClass(c.cls).label
            out.append("")
            out.append(f"case {i}: {label} (Vessiot dimension {c.vessiot_dim})")
            out.append("  guard:")
            for j, clause in enumerate(c.clauses):
                prefix = "    " if j == 0 else "    or "
                out.append(prefix + " and ".join(clause))
            out.append("  solution:")
            out += [f"    {s}" for s in c.solution]
            if c.parameter_condition is not None:
                out.append(f"  parameter condition: {c.parameter_condition}")
            out.append(f"  verification: {c.verification}")
        if self.warnings:
            out.append("")
            out += [f"warning: {w}" for w in self.warnings]
        if self.timings is not None:
            out.append("")
            out += [f"time {k}: {v:.6f} s" for k, v in sorted(self.timings.items())]
        return "\n".join(out) + "\n"


def serialize_report(doc: ReportDocument, format: str = "json") -> str:
    if format == "json":
        return doc.to_json()
    if format == "text":
        return doc.to_text()
    raise ValueError(f"unknown format {format!r}")
