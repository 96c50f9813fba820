"""Exception types shared across the toolkit."""


class ParmlError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(ParmlError):
    """A row or table violates its schema, or two schemas are incompatible."""


class CastError(ParmlError):
    """A cell cannot be converted to the requested kind."""


class EmptyTableError(ParmlError):
    """An operation that needs at least one row was given an empty table."""


class UserFunctionError(ParmlError):
    """A user-supplied function raised while being applied to rows or partitions."""


class DimError(ParmlError):
    """Matrix or vector dimensions do not line up."""


class UnsupportedError(ParmlError):
    """The operation is not defined for this storage layout or input."""


class SingularMatrixError(ParmlError):
    """A linear solve hit a pivot too small to trust."""


class DegenerateError(ParmlError):
    """An aggregation was given weights that sum to zero (or are negative)."""


class DivergenceError(ParmlError):
    """Optimization produced non-finite parameters."""


class ConfigError(ParmlError):
    """Invalid hyperparameter or experiment configuration."""
