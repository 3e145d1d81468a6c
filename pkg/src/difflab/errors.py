"""Exception types shared across the package."""


class DiffLabError(Exception):
    """Base class for all difflab errors."""


class EdgeListParseError(DiffLabError):
    """Raised when an edge-list document cannot be parsed.

    Carries the 1-based line number of the offending line.
    """

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class GraphValidationError(DiffLabError):
    """Raised when graph content violates an invariant (e.g. a self-link)."""


class ParameterError(DiffLabError):
    """Raised when model parameters are outside their valid domain."""


class CascadeError(DiffLabError):
    """Raised when cascade data violates its invariants."""


class SimulationProgressError(DiffLabError):
    """Raised when training-set generation exhausts its attempt budget."""


class EstimationError(DiffLabError):
    """Raised when likelihood maximization cannot proceed.

    Typically the data contain an event with probability zero under every
    parameter setting (an activation with no possible activator).
    """


class InsufficientDataError(DiffLabError):
    """Raised when a dataset is too small for the requested operation."""
