"""Exception types shared across the package."""


class DynApproxError(Exception):
    """Base class for all package errors."""


class InvalidEpsilon(DynApproxError):
    """eps outside (0, 1)."""


class TooLarge(DynApproxError):
    """An exact computation would exceed its configured work budget."""


class WidthExceeded(DynApproxError):
    """No decomposition within the width cap was found.

    Carries the best width seen, so callers can report how far off the
    input was from the promise.
    """

    def __init__(self, width, cap):
        super().__init__(f"decomposition width {width} exceeds cap {cap}")
        self.width = width
        self.cap = cap


class InvalidDecomposition(DynApproxError):
    """A tree decomposition failed validation against its graph."""


class PrefixViolation(DynApproxError):
    """A stash set is not ancestor-closed over the elimination forest."""


class NoCombination(DynApproxError):
    """State-monotonicity witness search found no combination state."""


class ParameterOverflow(DynApproxError):
    """Config tables exceed the resource budget for the requested level count."""


class PromiseViolation(DynApproxError):
    """Input broke a promise (degree cap, host subset, planarity surrogate)."""
