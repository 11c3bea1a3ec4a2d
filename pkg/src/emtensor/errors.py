"""Exception types shared across the library."""


class EmtensorError(Exception):
    """Base class for all library errors."""


class DomainError(EmtensorError):
    """A field or model was evaluated outside its domain of definition."""


class SingularMetricError(EmtensorError):
    """Metric inversion failed or is numerically unreliable."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ExpressionError(EmtensorError):
    """Malformed scenario expression; carries the source position."""

    def __init__(self, message, position):
        super().__init__(f"at position {position}: {message}")
        self.position = position


class GateError(EmtensorError):
    """A scenario failed one of its declared invariant gates."""


class ConfigError(EmtensorError):
    """Invalid run configuration (bad selector, bad mode, bad steps)."""
