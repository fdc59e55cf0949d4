"""Exception types shared across the package."""


class FamaError(Exception):
    """Base class for all package errors."""


class DomainError(FamaError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ConfigError(FamaError, ValueError):
    """Invalid configuration, scenario token or run parameter."""


class ModelError(FamaError, ValueError):
    """The requested quantity is undefined for the given system model."""


class ValidationFailure(FamaError):
    """A cross-validation check did not meet its tolerance.

    ``check`` names the failed relation (e.g. ``"deps-uplink-lb"``).
    """

    def __init__(self, check, message):
        super().__init__(f"{check}: {message}")
        self.check = check
