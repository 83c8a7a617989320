"""Exception types shared across the package."""


class UsageError(ValueError):
    """Bad arguments from a caller (out-of-range n, precision too low, ...)."""


class ConsistencyError(RuntimeError):
    """An internal cross-check failed; indicates a bug, never bad input."""
