class PoltrainError(Exception):
    """Base class for all package errors."""


class ValidationError(PoltrainError):
    """A value violates a structural invariant (bad partition, mismatched
    spaces, marginal defect, out-of-range transform point, ...)."""


class StabilizationError(PoltrainError):
    """A block-swap stabilised product disagreed between two safe cutoffs.

    This signals a bug in the caller or in the cutoff computation, not a
    mathematical possibility: once the cutoff exceeds every support bound
    the sandwiched product is provably constant.
    """
