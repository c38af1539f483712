# src/utils/errors.py


class TemporalCFError(Exception):
    """Base class for every error the recommender raises on purpose.

    `exit_code` is what the command-line front end exits with.
    """

    exit_code = 1

    def __init__(self, message, *, hint=None):
        super().__init__(message)
        self.message = message
        self.hint = hint


class UsageError(TemporalCFError):
    """Inconsistent or missing command-line flags."""

    exit_code = 1


class DataError(TemporalCFError):
    """Unreadable or invalid input data."""

    exit_code = 2


class UnknownTokenError(DataError):
    """A token is absent from a frozen item catalog."""

    def __init__(self, token, *, line_number=None):
        where = f" (line {line_number})" if line_number is not None else ""
        super().__init__(f"Unknown item token {token!r}{where}")
        self.token = token
        self.line_number = line_number


class CatalogMismatchError(TemporalCFError):
    """Model and corpus disagree about the item catalog."""

    exit_code = 3


class ModelFormatError(TemporalCFError):
    """A model document cannot be read back."""

    exit_code = 3
