"""The quantum while-language: syntax, parser, interpreter, exact
semantics, and the builtin gate library."""

from .parser import parse_program
from .interp import run_trajectory, TrajectoryResult
from .exact import semantic_function, ExactResult
from .syntax import Program, program_to_text

__all__ = [
    "parse_program",
    "run_trajectory",
    "TrajectoryResult",
    "semantic_function",
    "ExactResult",
    "Program",
    "program_to_text",
]
