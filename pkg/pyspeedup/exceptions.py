"""Pyspeedup exceptions."""

from __future__ import annotations


class PyspeedupError(Exception):
    """Class for pyspeedup exceptions."""


class ComplexError(PyspeedupError):
    """Class for malformed chromatic complexes."""


class NonChromaticError(ComplexError):
    """Raised when a simplex repeats a process id."""

    def __init__(self, pid: int):
        """Initialize the exception."""
        self.pid = pid
        self.message = f"Process id {pid} appears twice in the same simplex"
        super().__init__(self.message)


class EmptyComplexError(ComplexError):
    """Raised when a complex or a simplex would be empty."""


class EmptyResultError(ComplexError):
    """Raised when a projection keeps no vertex."""


class ModelError(PyspeedupError):
    """Class for invalid execution models."""


class UnsupportedCombinationError(ModelError):
    """Raised when a black box is combined with a non immediate snapshot model."""

    def __init__(self, comm: str, box: str):
        """Initialize the exception."""
        self.comm = comm
        self.box = box
        self.message = f"Black box '{box}' is only supported with immediate snapshot, not with '{comm}'"
        super().__init__(self.message)


class IdMismatchError(ModelError):
    """Raised when two simplices must share the same process ids and do not."""


class TaskError(PyspeedupError):
    """Class for invalid tasks."""


class BadGridError(TaskError):
    """Raised when an approximate agreement grid is not well formed."""


class InputMismatchError(TaskError):
    """Raised when comparing tasks with different input complexes."""


class NotInTargetError(TaskError):
    """Raised when a local task uses a vertex that Δ(σ) does not contain."""


class SolverError(PyspeedupError):
    """Class for decision map search exceptions."""


class ResourceLimitError(SolverError):
    """Raised when the search exceeds its node or time budget."""

    def __init__(self, budget: int | float, explored: int):
        """Initialize the exception."""
        self.budget = budget
        self.explored = explored
        self.message = f"Search budget {budget} exceeded after {explored} nodes"
        super().__init__(self.message)


class PartialMapError(SolverError):
    """Raised when a decision map leaves a protocol vertex unassigned."""


class NotASolutionError(SolverError):
    """Raised when a map handed to the speedup transform does not solve its task."""


class StepBudgetExceededError(PyspeedupError):
    """Raised when a lower bound chain neither halts nor reaches a fixed point."""

    def __init__(self, max_steps: int):
        """Initialize the exception."""
        self.max_steps = max_steps
        self.message = f"Lower bound chain did not halt within {max_steps} steps"
        super().__init__(self.message)


class RuleError(PyspeedupError):
    """Class for decision rule exceptions."""


class PartialRuleError(RuleError):
    """Raised when a decision rule is not defined on some view."""


class MissingPeerValueError(RuleError):
    """Raised when a losing test&set view does not contain the peer input."""


class DocumentError(PyspeedupError):
    """Raised when a JSON document cannot be parsed."""
