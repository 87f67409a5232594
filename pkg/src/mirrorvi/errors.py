"""Error types shared across the library."""


class MirrorVIError(Exception):
    """Base class for all library errors."""


class InvalidInput(MirrorVIError, ValueError):
    """An argument violates a documented precondition."""


class EvaluationError(MirrorVIError, ArithmeticError):
    """An operator or demand evaluation produced non-finite values."""


class Unsupported(MirrorVIError, NotImplementedError):
    """The request is outside the supported problem sizes."""


class InsufficientData(MirrorVIError, ValueError):
    """A trace is too short for the requested statistic."""


class DegenerateSolution(MirrorVIError, ArithmeticError):
    """The run landed on the trivial all-zero price vector."""
