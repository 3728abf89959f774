"""Exception hierarchy shared by every stage of the pipeline."""


class AppraisalError(Exception):
    """Base class for all errors raised by nftappraise."""


class ValidationError(AppraisalError, ValueError):
    pass


class ConfigError(AppraisalError):
    pass


class TransportError(AppraisalError):
    pass


class SchemaError(AppraisalError):
    pass


class NoFixtureError(AppraisalError):
    pass


class AlignmentError(AppraisalError):
    pass


class ParseError(AppraisalError, ValueError):
    pass


class RankError(AppraisalError):
    """Design matrix is numerically rank deficient.

    ``dependent`` lists the columns found to be linear combinations of
    the others.
    """

    def __init__(self, message, dependent=()):
        super().__init__(message)
        self.dependent = list(dependent)


class EliminationError(AppraisalError):
    """Stepwise elimination would remove every predictor."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


class DivergenceError(AppraisalError):
    """Training produced a non-finite loss."""

    def __init__(self, message, epoch, report=None):
        super().__init__(message)
        self.epoch = epoch
        self.report = report
