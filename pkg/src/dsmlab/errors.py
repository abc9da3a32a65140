"""Exception types shared across the package.

Everything raised on purpose derives from DsmError so callers (and the CLI)
can separate domain-level failures from genuine bugs.
"""


class DsmError(Exception):
    """Base class for all signalled failures."""


class DomainError(DsmError):
    """An argument lies outside the mathematical domain of the operation."""


class RangeError(DsmError):
    """A value left the representable floating-point range (over/underflow)."""


class CycleError(DsmError):
    """Cycle search, refinement, or orbit-type extraction failed."""


class LinearizationError(DsmError):
    """Linearizing-coordinate iteration diverged or its preconditions failed."""


class MarkovError(DsmError):
    """Basin-arc or partition construction violated a structural check."""


class ContinuationError(DsmError):
    """Parameter continuation stalled; carries the last parameter that worked."""

    def __init__(self, message, last_good=None):
        super().__init__(message)
        self.last_good = last_good
