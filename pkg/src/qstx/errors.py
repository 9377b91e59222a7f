class QstxError(Exception):
    """Base class for every error raised by qstx."""


class ValidationError(QstxError, ValueError):
    """An input violates an operation's preconditions."""


class CapacityError(ValidationError):
    """A tensor dimension would exceed the configured cap."""
