"""Deciders for equivalence and containment of primitive positive
formulas over finite structures, with the supporting universal-algebra
toolkit and the two verified reduction pipelines."""

from .errors import BudgetExceededError, ParseError, PPCompError, ValidationError
from .model import (
    Assignment,
    Atom,
    Equality,
    PPFormula,
    RelStructure,
    SortedPPFormula,
    Verdict,
)

__all__ = [
    "Assignment",
    "Atom",
    "BudgetExceededError",
    "Equality",
    "PPCompError",
    "PPFormula",
    "ParseError",
    "RelStructure",
    "SortedPPFormula",
    "ValidationError",
    "Verdict",
]

__version__ = "0.1.0"
