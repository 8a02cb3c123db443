"""Exception hierarchy shared by all modules."""


class FriedrichsError(Exception):
    """Base class; ``params`` carries the offending parameter set when known."""

    def __init__(self, message, **params):
        super().__init__(message)
        self.params = params


class NumericalError(FriedrichsError):
    """A computation could not reach its accuracy contract."""


class ValidationError(FriedrichsError, ValueError):
    """Inputs violate a documented precondition."""


class PoleError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class GridError(ValidationError):
    pass


class BandError(ValidationError):
    pass


class PoleProximityError(ValidationError):
    pass


class ResonanceError(ValidationError):
    pass


class ParityError(ValidationError):
    pass


class BoundaryError(ValidationError):
    pass


class SpecError(ValidationError):
    pass


class ConvergenceError(NumericalError):
    pass


class OscillationError(NumericalError):
    pass


class FactorizationError(NumericalError):
    pass
