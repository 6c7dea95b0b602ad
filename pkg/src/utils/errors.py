"""Exception hierarchy for graph reconstruction.

Every error carries the exit code the CLI returns when it escapes a command.
"""

from typing import Optional, Tuple


class GrandError(Exception):
    """Base class for all reconstruction errors."""

    exit_code: int = 1


class ParseError(GrandError):
    """Malformed or non-simple input file."""

    exit_code = 2

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class InvalidKnowledgeError(GrandError):
    """Prior knowledge contradicts itself or references invalid pairs."""

    exit_code = 3


class InconsistentInputsError(GrandError):
    """The common-neighbors matrix and the knowledge cannot both be true."""

    exit_code = 3

    def __init__(
        self,
        message: str,
        cell: Optional[Tuple[int, int]] = None,
        attack: Optional[str] = None,
    ):
        self.cell = cell
        self.attack = attack
        details = []
        if attack:
            details.append(f"attack={attack}")
        if cell is not None:
            details.append(f"cell=({cell[0]}, {cell[1]})")
        suffix = f" [{', '.join(details)}]" if details else ""
        super().__init__(f"{message}{suffix}")


class CapacityError(GrandError):
    """An exhaustive search would exceed its configured size."""

    exit_code = 4


class NumericalError(GrandError):
    """Eigendecomposition did not converge."""


class ContractError(GrandError):
    """Inputs disagree on dimensions or shape."""


class UndefinedMetricError(GrandError):
    """A metric denominator is zero."""
