"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class IntComplexityError(Exception):
    """Base class for library errors."""


class ResourceLimitError(IntComplexityError, MemoryError):
    """A configured resource cap would be exceeded."""


class OutOfRangeError(IntComplexityError, IndexError):
    """An argument lies outside the range covered by a table."""


class ContractError(IntComplexityError, ValueError):
    """A documented precondition was violated."""


class IndeterminateError(IntComplexityError):
    """A result depends on a stability verdict that could not be certified.

    Raised only under the ``strict`` policy.  ``items`` lists the offending
    arguments when there is more than one.
    """

    def __init__(self, message: str, items=()):
        super().__init__(message)
        self.items = list(items)


class CacheFormatError(IntComplexityError, ValueError):
    """A table cache file is malformed."""
