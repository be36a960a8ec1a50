"""Exception types shared across the package.

Exit-code mapping used by the CLI: InputError -> 1, ResourceLimitError -> 2,
escape witnesses (not an exception) -> 3.
"""


class InputError(ValueError):
    """Invalid user-supplied input: bad vertices, malformed files, illegal moves."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed its configured state/move budget.

    Carries whatever bounds were known at the time so callers can still
    report something useful.
    """

    def __init__(self, message, *, estimate=None, bounds=None):
        super().__init__(message)
        self.estimate = estimate
        self.bounds = bounds or {}


class StrategyError(InputError):
    """A strategy emitted an illegal move or was driven into an unsupported state."""
