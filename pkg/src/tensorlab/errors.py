"""Exception hierarchy.

Validation problems derive from ``ValueError`` (CLI exit 2); resource and
field-size problems derive from :class:`ResourceError` (CLI exit 3).
"""


class TensorLabError(Exception):
    """Base class for every error raised by tensorlab."""


class ValidationError(TensorLabError, ValueError):
    pass


class ResourceError(TensorLabError):
    """The request is well formed but cannot be served within limits."""


class MixedFieldsError(ValidationError):
    pass


class DivisionByZeroError(TensorLabError, ZeroDivisionError):
    pass


class IndexOutOfRangeError(ValidationError, IndexError):
    pass


class DuplicateIndexError(ValidationError):
    pass


class OrderMismatchError(ValidationError):
    pass


class BadLegSetError(ValidationError):
    pass


class BadPermutationError(ValidationError):
    pass


class ShapeMismatchError(ValidationError):
    pass


class BadParameterError(ValidationError):
    pass


class ZeroTensorError(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class AxiomNotDeclaredError(ValidationError):
    pass


class UnsupportedFieldError(ResourceError):
    pass


class BudgetExceededError(ResourceError):
    pass


class FieldTooSmallError(ResourceError):
    pass


class RetriesExhaustedError(ResourceError):
    pass
