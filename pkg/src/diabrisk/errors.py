"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: DataError -> 2, TrainingError -> 3.
"""


class DiabriskError(Exception):
    """Base class for all package errors."""


class DataError(DiabriskError):
    """Raised for malformed, inconsistent, or degenerate input data."""


class TrainingError(DiabriskError):
    """Raised when a model fit cannot proceed or converge."""


class ArtifactError(DiabriskError):
    """Raised for unreadable, corrupted, or unsupported model artifacts."""
