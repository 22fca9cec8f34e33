from typing import Optional


class AlleeError(Exception):
    """Base class of every error raised by this package."""


class DomainError(AlleeError, ValueError):
    """A parameter or state violates an invariant or an operation's precondition."""


class KinkError(DomainError):
    """A derivative was requested where the reaction is not differentiable."""

    # location of the kink
    kink: float

    def __init__(self, kink: float) -> None:
        super().__init__(f"sawtooth reaction is not differentiable at its kink s={kink}")
        self.kink = kink


class UnsupportedError(AlleeError):
    """The operation is not defined for the given inputs."""


class ConfigError(AlleeError, ValueError):
    """A configuration document could not be parsed or validated."""

    # dotted path of the offending field, e.g. "model.D"
    path: Optional[str]

    def __init__(self, message: str, path: Optional[str] = None) -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class ExportError(AlleeError, OSError):
    """A result file could not be written or read back."""


class UsageError(AlleeError):
    """The command line could not be parsed."""
