"""Exception hierarchy shared by the sharing modules and the CLI."""

from utils.config import EXIT_CODES


class SharingError(Exception):
    """Base class; `exit_code` is what the CLI returns for it."""

    exit_code = EXIT_CODES["usage"]


class AccessStructureError(SharingError, ValueError):
    """Invalid subset, basis, or structure spec."""


class UnauthorizedSubsetError(SharingError, ValueError):
    exit_code = EXIT_CODES["unauthorized"]


class UnknownSubsetKeyError(SharingError, KeyError):
    """Subset is not a minimal authorized subset of the control area."""

    exit_code = EXIT_CODES["unauthorized"]

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown subset key"


class ShareError(SharingError, ValueError):
    """Missing, extra, duplicate, or wrong-length shares."""

    exit_code = EXIT_CODES["malformed"]


class SecretLengthError(SharingError, ValueError):
    exit_code = EXIT_CODES["secret_length"]


class CommitmentsMissingError(SharingError, LookupError):
    exit_code = EXIT_CODES["no_commitments"]


class VersionError(SharingError, ValueError):
    exit_code = EXIT_CODES["version"]


class VersionOverflowError(SharingError, OverflowError):
    exit_code = EXIT_CODES["version_overflow"]


class ShareBindingError(VersionError):
    """Share file belongs to a different scheme."""


class MalformedFileError(SharingError, ValueError):
    exit_code = EXIT_CODES["malformed"]


class ParameterError(SharingError, ValueError):
    """Bad numeric parameters for the Shamir baseline or the demo."""


class BudgetExceededError(SharingError, RuntimeError):
    exit_code = EXIT_CODES["budget"]

    def __init__(self, message: str, calls: int = 0):
        super().__init__(message)
        self.calls = calls
