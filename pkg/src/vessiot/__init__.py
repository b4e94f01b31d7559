"""Real geometric singularities of implicit polynomial ODE systems."""
from __future__ import annotations

__version__ = "0.1.0"

from .formula import And, Atom, Dnf, Guard, Not, Or, Rel, simplify, to_dnf  # noqa: E402
from .jet import DifferentialSystem, prolong, vessiot_matrix  # noqa: E402
from .parsing import ParseError, format_system, parse_formula, parse_poly, parse_system  # noqa: E402
from .pgauss import EliminationTask, ParamSolution, parametric_gauss  # noqa: E402
from .poly import Poly, Var  # noqa: E402
from .qelim import ExistentialQuery, Verdict, decide, eliminate_var  # noqa: E402
from .singular import (  # noqa: E402
    CaseReport,
    SingularityClass,
    classify,
    rank_classify_at_point,
    real_singularities,
)

__all__ = [
    "And", "Atom", "CaseReport", "DifferentialSystem", "Dnf", "EliminationTask",
    "ExistentialQuery", "Guard", "Not", "Or", "ParamSolution", "ParseError", "Poly",
    "Rel", "SingularityClass", "Var", "Verdict", "classify", "decide", "eliminate_var",
    "format_system", "parametric_gauss", "parse_formula", "parse_poly", "parse_system",
    "prolong", "rank_classify_at_point", "real_singularities", "simplify", "to_dnf",
    "vessiot_matrix",
]
