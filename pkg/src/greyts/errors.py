"""Exception types shared across the library."""


class GreyTsError(Exception):
    """Base class for every error raised by this package."""


class MembershipError(GreyTsError):
    """A time value does not belong to the time scale (or its derivative domain)."""


class OrderError(GreyTsError):
    """Integration bounds were supplied in decreasing order."""


class InsufficientNodes(GreyTsError):
    """A sampled function does not carry the nodes an operation needs."""


class BranchError(GreyTsError):
    """Cylinder transform evaluated outside its real branch."""


class RegressivityError(GreyTsError):
    """The coefficient is singular at a scattered point, so the generalized exponential does not exist."""


class TooFewSamples(GreyTsError):
    """Not enough observations for the requested operation."""


class SingularDesign(GreyTsError):
    """Least-squares design matrix is rank deficient."""


class AlignmentError(GreyTsError):
    """Actual and fitted series do not share the same time stamps."""


class AllZeroActuals(GreyTsError):
    """MAPE is undefined when every actual value is zero."""


class DomainError(GreyTsError):
    """Argument outside the mathematical domain of the operation."""


class EmptyInput(GreyTsError):
    """An input sequence was empty."""


class ParseError(GreyTsError):
    """Malformed CSV content or time-scale text."""


class NonMonotoneTime(GreyTsError):
    """Time stamps must be strictly increasing."""
