"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class CMLLError(Exception):
    code = "error"


class ValidationError(CMLLError, ValueError):
    """Bad input: not squarefree, not coprime, malformed series, ..."""

    code = "validation"


class CapExceeded(ValidationError):
    code = "cap_exceeded"


class PrecisionError(CMLLError):
    code = "precision"

    def __init__(self, message, advisory_bits=None):
        super().__init__(message)
        self.advisory_bits = advisory_bits


class InternalConsistencyError(CMLLError, RuntimeError):
    """Raised when a computation contradicts a theorem it relies on."""

    code = "internal"
