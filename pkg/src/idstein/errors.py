"""Exception hierarchy shared by all modules."""


class IDSteinError(Exception):
    """Base class for every error raised by the package."""


class ConfigInvalid(IDSteinError):
    """An experiment configuration failed validation."""


class NumericalFailure(IDSteinError):
    """A numerical routine could not certify its result.

    Parameters
    ----------
    message : str
        Human readable description.
    term : str, optional
        Name of the failing term, reported by the CLI.
    """

    def __init__(self, message, term=None):
        super().__init__(message)
        self.term = term


class QuadratureFailure(NumericalFailure):
    pass


class InvalidTriplet(IDSteinError, ValueError):
    pass


class RepresentationUnavailable(IDSteinError):
    pass


class InfiniteMean(RepresentationUnavailable):
    pass


class AssumptionViolated(IDSteinError):
    pass


class DomainError(IDSteinError, ValueError):
    pass


class TruncationTooCoarse(NumericalFailure):
    pass


class MissingDerivative(IDSteinError):
    pass


class MissingKFunction(IDSteinError):
    pass


class SlowDecay(NumericalFailure):
    pass


class NearZeroModulus(NumericalFailure):
    pass


class TailDivergence(NumericalFailure):
    pass


class PhaseUnwrapFailure(NumericalFailure):
    pass


class NoMuTSampler(IDSteinError):
    pass


class TailBudgetExceeded(NumericalFailure):
    pass


class GridTooCoarse(NumericalFailure):
    pass


class FitFailure(NumericalFailure):
    pass
