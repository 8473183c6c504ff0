"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """Raised when a request exceeds a configured size guard (qubit or site caps)."""


class NumericalAbortError(RuntimeError):
    """Raised when an evolution step produces non-finite parameter updates."""
