"""Exception types shared across the package."""


class SelinetError(Exception):
    """Base class for all package errors."""


class DimensionError(SelinetError):
    """Shapes of the operands do not agree."""


class ArgumentError(SelinetError):
    """A scalar argument is outside its legal range."""


class LabelError(SelinetError):
    """A label vector violates its contract (e.g. no true class)."""


class SchemaError(SelinetError):
    """An emotion/sentiment name is not covered by the active schema."""


class ConfigError(SelinetError):
    """A config file contains unknown or ill-typed keys."""


class FormatError(SelinetError):
    """A binary or JSONL file is malformed.

    `offset` carries the byte offset (binary files) or line number
    (JSONL) where parsing failed, when known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)
        self.offset = offset


class UndefinedMetricError(SelinetError):
    """A metric is undefined for the given inputs (e.g. AP with no positives)."""
