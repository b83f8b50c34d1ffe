"""Exception types shared across the engine."""


class BayesPowerError(Exception):
    """Base class for all engine errors."""


class InvalidArgumentError(BayesPowerError, ValueError):
    """An argument violates a documented precondition."""


class UnsupportedDimensionError(InvalidArgumentError):
    """Requested low-discrepancy dimension is outside the supported range."""

    def __init__(self, dimension: int, maximum: int):
        self.dimension = dimension
        self.maximum = maximum
        super().__init__(
            f"dimension {dimension} unsupported; must be between 1 and {maximum}"
        )


class StreamExhaustedError(BayesPowerError):
    """A low-discrepancy stream ran past its maximum index."""


class FactorizationError(BayesPowerError):
    """Cholesky factorization failed on a non-positive-definite matrix."""

    def __init__(self, pivot: int, value: float):
        self.pivot = pivot
        self.value = value
        super().__init__(
            f"matrix is not positive definite: pivot {pivot} has value {value:.6g}"
        )


class ConvergenceError(BayesPowerError):
    """An iterative solver exceeded its iteration budget.

    Carries the best iterate found so far in ``best_x`` / ``best_f``.
    """

    def __init__(self, message: str, best_x=None, best_f=None):
        self.best_x = best_x
        self.best_f = best_f
        super().__init__(message)


class OptimizationError(BayesPowerError):
    """A local optimizer hit a non-finite objective or failed to make progress."""

    def __init__(self, message: str, trace=None):
        self.trace = trace or []
        super().__init__(message)


class EvaluationError(BayesPowerError):
    """A numerical kernel produced non-finite output."""


class UnsupportedOperationError(BayesPowerError):
    """Operation is not defined for this model family."""


class DegenerateGradientError(BayesPowerError):
    """A group-characteristic gradient vanished at the evaluation point."""


class UnattainableDesignError(BayesPowerError):
    """The design value lies outside the hypothesis interval, so power
    cannot reach the target for any sample size."""


class GridResolutionError(BayesPowerError):
    """The posterior grid left too much mass outside its bounds."""

    def __init__(self, message: str, suggested_bounds=None):
        self.suggested_bounds = suggested_bounds
        super().__init__(message)
