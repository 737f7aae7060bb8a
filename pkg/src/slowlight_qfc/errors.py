"""Exception hierarchy shared by every module of the package."""


class QFCError(Exception):
    """Base class for all errors raised by slowlight_qfc."""


class ParameterDomainError(QFCError, ValueError):
    """An input lies outside the domain where an operation is defined."""


class ConfigError(QFCError, ValueError):
    """A configuration file or configuration object is inconsistent."""


class NumericalError(QFCError, RuntimeError):
    """A numerical procedure diverged or produced non-finite values."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
