"""Exception types shared across the package."""


class PlumeInputError(ValueError):
    """Bad user input: malformed files, inconsistent dimensions, invalid parameters."""


class ContractViolation(RuntimeError):
    """An internal stage produced output that breaks its documented contract."""
