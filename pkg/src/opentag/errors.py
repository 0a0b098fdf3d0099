"""Exception hierarchy shared across the package.

Every error raised by public API surfaces derives from OpenTagError so callers
can catch one type at the boundary (the CLI maps subclasses to exit codes).
"""


class OpenTagError(Exception):
    """Base class for all package errors."""


class ShapeError(OpenTagError):
    """Operand dimensions are incompatible. Message names both shapes."""


class NumericError(OpenTagError):
    """A value that must be finite is NaN/Inf, or a numeric routine degenerated."""


class DegenerateInputError(OpenTagError):
    """Structurally empty input: fully masked softmax row, zero valid tokens,
    zero-norm vector in a cosine, and similar."""


class ConfigError(OpenTagError):
    """Invalid hyperparameter or configuration value."""


class ValidationError(OpenTagError):
    """Input data failed schema or business-rule validation."""


class DuplicateTagError(ValidationError):
    """An open tag collides with an existing display name."""


class TagNotFoundError(OpenTagError):
    """Lookup failed. Carries nearest-name suggestions when available."""

    def __init__(self, message: str, suggestions: list[str] | None = None):
        super().__init__(message)
        self.suggestions = suggestions or []


class MissingEmbeddingError(OpenTagError):
    """An archive provider has no vector for the requested key."""

    def __init__(self, key: str):
        super().__init__(f"no embedding stored for key {key!r}")
        self.key = key


class FormatError(OpenTagError):
    """A binary or line-oriented file failed framing validation.

    byte_offset (when known) points at the first offending byte.
    """

    def __init__(self, message: str, byte_offset: int | None = None):
        if byte_offset is not None:
            message = f"{message} (at byte offset {byte_offset})"
        super().__init__(message)
        self.byte_offset = byte_offset


class ArtifactMismatchError(OpenTagError):
    """Two artifacts that must agree (e.g. checkpoint vs manifest taxonomy hash) do not."""
