"""Exception types shared across the package."""


class MSQGError(Exception):
    """Base class for all errors raised by msqglab."""


class DomainError(MSQGError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularityError(MSQGError, ArithmeticError):
    """Two points coincide where the exact kernel is singular.

    ``pair`` holds the offending indices when known.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class StepRejected(MSQGError):
    """An RK stage came closer to collapse than the guard allows."""

    def __init__(self, message, time=None, min_distance=None):
        super().__init__(message)
        self.time = time
        self.min_distance = min_distance


class DisjointnessError(DomainError):
    pass


class ProfileError(DomainError):
    pass


class ExtrapolationError(DomainError):
    pass


class AlignmentError(DomainError):
    pass


class SearchFailure(MSQGError):
    """No candidate configuration met the residual tolerance."""

    def __init__(self, message, best=None, residual_log=None):
        super().__init__(message)
        self.best = best
        self.residual_log = residual_log or []


class ConfigError(MSQGError):
    """Configuration failed validation; ``errors`` lists every problem."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
