"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: configuration/input problems
(ParameterError, ParseError, SchemaError, ConfigError) exit 2, runtime
failures (DomainError, DataError, unexpected I/O) exit 1.
"""


class PartsimError(Exception):
    """Base class for all package errors."""


class ParameterError(PartsimError):
    """An argument violates a documented precondition."""


class DomainError(PartsimError):
    """An operation was applied to a value outside its domain (e.g. empty input)."""


class ParseError(PartsimError):
    """Input bytes could not be parsed; message carries line/field context."""


class SchemaError(PartsimError):
    """Parsed document is missing mandatory fields or has wrong field types."""


class DataError(PartsimError):
    """Well-formed data violates a consistency requirement (duplicates, ordering)."""


class ConfigError(PartsimError):
    """Run configuration is invalid; message names the offending field path."""
