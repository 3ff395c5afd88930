"""Epsilon substitution method: syntax, critical formulas, and a solver.

The main entry points are :func:`epsub.syntax.parse_program`,
:func:`epsub.translate.build_system` and :func:`epsub.engine.solve`.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .complexity import Complexity, SystemMeasure, complexity, degree, measure, rank
from .engine import Diverged, Keep, SolveResult, SubstitutionStep, Witness, solve
from .syntax import parse, parse_formula, parse_program, parse_term, to_str
from .taut import Countermodel, Tautology, is_tautology
from .translate import CriticalFormula, SystemE, build_system, critical_formula, epsilon_translate

__all__ = [
    "Complexity",
    "Countermodel",
    "CriticalFormula",
    "Diverged",
    "Keep",
    "SolveResult",
    "SubstitutionStep",
    "SystemE",
    "SystemMeasure",
    "Tautology",
    "Witness",
    "__version__",
    "build_system",
    "complexity",
    "critical_formula",
    "degree",
    "epsilon_translate",
    "is_tautology",
    "measure",
    "parse",
    "parse_formula",
    "parse_program",
    "parse_term",
    "rank",
    "solve",
    "to_str",
]
