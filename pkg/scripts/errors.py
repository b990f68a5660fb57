"""
Exception hierarchy shared by all toolkit modules.

Every error carries the exit code the command-line surface reports for it.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ParseError(ToolkitError):
    """Malformed input file."""

    exit_code = 2

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DataError(ToolkitError):
    """Input values that parse but are unusable (non-finite, degenerate)."""

    exit_code = 2


class SemanticError(ToolkitError):
    exit_code = 3


class SignalMaskError(SemanticError):
    """A requested signal is absent, or masks of two inputs disagree."""


class MaskError(SemanticError):
    """Target signal mask is not compatible with the requested transformation."""


class SubsetError(SemanticError):
    """Augmentation subset without positions or outside the dataset's signals."""


class DomainError(SemanticError):
    """Domain id outside the registered range."""


class ConfigError(SemanticError):
    pass


class RangeError(SemanticError):
    pass


class EmptyInputError(SemanticError):
    pass


class EmptyWindowError(SemanticError):
    pass


class ModeError(SemanticError):
    """Lookup table mode does not match the requested encoding variant."""


class ShapeError(SemanticError):
    pass


class NumericsError(ToolkitError):
    """Non-finite intermediate value."""


class InternalError(ToolkitError):
    """Broken invariant that cannot occur for well-formed inputs."""


class UsageError(ToolkitError):
    """Malformed command-line flag value."""

    exit_code = 64
