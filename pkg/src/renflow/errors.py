"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input object violates one of its documented invariants."""


class MalformedHeaderError(ValidationError):
    """A CSV file is missing its header row or a required column."""


class NonAscendingTimestampsError(ValidationError):
    """Timestamps in a series are not strictly ascending."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its iteration budget without converging."""
