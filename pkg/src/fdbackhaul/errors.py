"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid generation parameters or run configuration."""


class GeometryError(ValueError):
    """Degenerate geometry: coincident points, zero distance, bad angle."""


class FeasibilityError(ValueError):
    """An active set violates the hard full-duplex role constraints."""


class ScheduleError(ValueError):
    """A schedule failed structural validation."""


class BudgetError(RuntimeError):
    """Exact search refused: the instance exceeds the configured budget."""
