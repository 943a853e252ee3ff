"""
Exceptions raised by the operation calculus.

Each error also derives from the builtin a caller would naturally catch
(ValueError for bad input, RuntimeError for guards), so plain
``except ValueError`` keeps working.
"""


class PartitionOpsError(Exception):
    """Base class for every error raised by this package."""


class MixedPrimeError(PartitionOpsError, ValueError):
    """Scalars or words over different primes were combined."""


class UnsupportedPrimeError(PartitionOpsError, ValueError):
    """The requested p is not a prime or exceeds the configured bound."""


class DegreeMismatchError(PartitionOpsError, ValueError):
    """Source and target degrees of two operands do not line up."""


class RelationNotApplicable(PartitionOpsError, ValueError):
    """A relation was requested outside of its applicability window."""

    def __init__(self, detail: str):
        super().__init__(f"relation not applicable: {detail}")


class RestrictionUndefined(PartitionOpsError, ValueError):
    """The restriction was requested on a class where it does not exist."""

    def __init__(self, detail: str):
        super().__init__(f"restriction undefined: {detail}")


class WordSyntaxError(PartitionOpsError, ValueError):
    """An operation word could not be parsed."""


class RewriteLimitExceeded(PartitionOpsError, RuntimeError):
    """A rewriting loop ran past its iteration guard."""


class ResourceLimitExceeded(PartitionOpsError, RuntimeError):
    """A computation would exceed the configured memory budget."""
