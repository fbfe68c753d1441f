"""Exception hierarchy shared across the package."""


class GiftexError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(GiftexError, ValueError):
    """A parameter value is outside its valid range."""


class IllegalMoveError(GiftexError):
    """An action violates the game rules in the current state."""


class PhaseError(GiftexError):
    """An operation was invoked in the wrong game phase."""
