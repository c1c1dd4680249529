class EmkError(Exception):
    """Base class for failures reported to the command line with an exit code."""

    exit_code: int = 1


class ValidationError(EmkError, ValueError):
    """Malformed input or violated precondition."""

    exit_code = 2


class VerificationMismatch(EmkError):
    """An exact identity that should hold did not."""

    exit_code = 3

    def __init__(self, message: str, details: list[dict] | None = None, document: dict | None = None) -> None:
        super().__init__(message)
        self.details = details or []
        self.document = document
