"""Exception hierarchy for ghostsim."""


class GhostSimError(Exception):
    """Base class for all errors raised by ghostsim."""


class DomainError(GhostSimError, ValueError):
    """An argument lies outside the domain of the operation (e.g. k <= 0)."""


class ConfigurationError(GhostSimError, ValueError):
    """Inconsistent or malformed configuration (grid/cutoff mismatch, bad config file)."""

    def __init__(self, message, *, line=None, field=None):
        self.message = message
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class TruncationError(GhostSimError, ValueError):
    """The Fock-space truncation is too small for the requested state."""

    def __init__(self, message, required_n=None):
        self.required_n = required_n
        if required_n is not None:
            message = f"{message}; need N >= {required_n}"
        super().__init__(message)


class UndefinedConditionalError(GhostSimError, ZeroDivisionError):
    """Conditioning on a subspace that carries zero probability weight."""
