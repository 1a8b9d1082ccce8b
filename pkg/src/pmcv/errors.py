"""Exception hierarchy shared by all modules."""


class PMCVError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(PMCVError, ValueError):
    pass


class AmbiguityError(PMCVError):
    """A numerical decision (clustering, rank) fell inside the ambiguity band.

    ``candidates`` holds the competing interpretations so callers can report
    them instead of silently picking one.
    """

    def __init__(self, message, candidates=None):
        super().__init__(message)
        self.candidates = candidates or []


class SelfAdjointnessError(PMCVError):
    pass


class SignatureError(PMCVError):
    pass


class DegenerateMetricError(PMCVError):
    pass


class LightlikeNormalError(PMCVError):
    pass


class DomainError(PMCVError, ValueError):
    pass


class StructureError(PMCVError):
    """Frame ODE specification does not preserve its Gram matrix."""


class FeasibilityError(PMCVError, ValueError):
    pass


class ParityError(FeasibilityError):
    pass


class InconsistencyError(PMCVError):
    pass
