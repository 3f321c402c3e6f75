"""Polynomial optimization through moment relaxations with KKT-type constraint sets."""

from .constraints import ConstraintSet, ProblemInstance
from .driver import RunConfig, minimize, real_radical
from .polycore import Polynomial, VariableSpace, parse_polynomial
from .problems import example, load_problem, parse_problem

__all__ = ["ConstraintSet", "ProblemInstance", "RunConfig", "minimize", "real_radical", "Polynomial",
           "VariableSpace", "parse_polynomial", "example", "load_problem", "parse_problem"]
__version__ = "0.1.0"
