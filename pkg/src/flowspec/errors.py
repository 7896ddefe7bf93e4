"""Exception hierarchy; each class carries the CLI exit code it maps to."""


class FlowSpecError(Exception):
    exit_code = 1


class ParseError(FlowSpecError, ValueError):
    exit_code = 2


class PreconditionError(FlowSpecError, ValueError):
    exit_code = 3


class DegenerateError(PreconditionError):
    """Input is valid but carries no usable direction (constant vector, zero weights)."""


class ConvergenceError(FlowSpecError, RuntimeError):
    exit_code = 4


class InvariantViolation(FlowSpecError, AssertionError):
    """An internal guarantee failed; always indicates a bug, never bad input."""

    exit_code = 5
