"""Exception types shared across the package."""


class CpspectraError(Exception):
    """Base class for errors raised by this package."""


class FormatError(CpspectraError, ValueError):
    """Malformed JSON payload or matrix schema."""


class PreconditionError(CpspectraError, ValueError):
    """A mathematical precondition of an operation is violated."""


class BudgetExceededError(CpspectraError, RuntimeError):
    """A configured enumeration or size budget would be exceeded."""


class ConvergenceError(CpspectraError, RuntimeError):
    """An iterative computation or factorization failed to converge."""
