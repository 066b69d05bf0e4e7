"""Exception types shared across the package."""


class HelperRateError(Exception):
    """Base class for all numerical and validation failures."""


class NotHermitian(HelperRateError):
    pass


class NoConvergence(HelperRateError):
    pass


class NotPSD(HelperRateError):
    pass


class DimensionOverflow(HelperRateError):
    pass


class DimMismatch(HelperRateError):
    pass


class BadDims(HelperRateError):
    pass


class InvalidDistribution(HelperRateError):
    pass


class InvalidEnsemble(HelperRateError):
    pass


class InvalidState(HelperRateError):
    pass


class InvalidPovm(HelperRateError):
    pass


class CapExceeded(HelperRateError):
    pass


class InsufficientTrials(HelperRateError):
    pass


class InvalidSourceSpec(HelperRateError):
    """Malformed source/witness document; treated as an input error by the CLI."""
