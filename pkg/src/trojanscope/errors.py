"""Exception hierarchy with a stable CLI exit-code mapping.

Exit codes: 0 success, 2 config/validation, 3 data, 4 internal.
"""


class TrojanScopeError(Exception):
    """Base class for all errors raised by this package."""

    #: pipeline stage name, attached by the pipeline runner when known
    stage: str | None = None


class ConfigError(TrojanScopeError):
    """Invalid configuration or user input (exit code 2)."""


class UnknownFeatureError(ConfigError):
    """Feature name not in the canonical schema."""


class DataError(TrojanScopeError):
    """Problem with input data, models on disk, or training sets (exit code 3)."""


class ParseError(DataError):
    """Malformed cell in a CSV file; carries 1-based coordinates."""

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class EmptyDatasetError(DataError):
    """File or directory contained no traces."""


class ShapeError(DataError):
    """Ragged rows, mismatched lengths, or otherwise inconsistent shapes."""


class StratificationError(DataError):
    """Stratified split requested on a dataset missing a class."""


class NumericInputError(DataError):
    """Non-finite value where a finite real was required."""


class SchemaError(DataError):
    """Feature schema mismatch between vectors or against a trained model."""


class DegenerateTrainingError(DataError):
    """Training set does not contain both classes."""


class ClassCoverageError(DataError):
    """Operation needs samples from both classes."""


class ModelFormatError(DataError):
    """Unknown model kind or unsupported persistence format version."""


class ModelIntegrityError(DataError):
    """Model file corrupted: unparseable or checksum mismatch."""


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit-code contract."""
    if isinstance(exc, ConfigError):
        return 2
    if isinstance(exc, DataError):
        return 3
    return 4
