"""Exception types shared across the package.

Each family maps to one CLI exit code: usage (1), data/parse (2),
model store (3), numeric (4).
"""


class UsageError(Exception):
    """Bad command line or run configuration."""


class DataError(Exception):
    """Input data violates a documented contract (bad values, empty sets)."""


class CsvParseError(DataError):
    """Structurally invalid CSV; carries the 1-based record number."""

    def __init__(self, message, record_number=None):
        if record_number is not None:
            message = f"record {record_number}: {message}"
        super().__init__(message)
        self.record_number = record_number


class ModelStoreError(Exception):
    """A saved model bundle is missing, corrupt, or incompatible."""


class NumericError(ArithmeticError):
    """Non-finite values where finite ones are required."""


class ShapeError(ValueError):
    """Tensor or matrix shapes violate an operation's contract."""
