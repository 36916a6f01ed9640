"""Exception hierarchy shared by every dcmlab package."""

from typing import Any


class DCMError(Exception):
    """Base class for all dcmlab errors."""


class DomainError(DCMError, ValueError):
    """A parameter or input lies outside its valid domain."""


class UnsupportedModelError(DCMError, ValueError):
    """The requested operation is not defined for this model or response space."""


class SizeLimitError(DCMError, ValueError):
    """A class space or pattern space exceeds the configured cap."""

    def __init__(self, message: str, size: int, cap: int):
        super().__init__(message)
        self.size = size
        self.cap = cap


class PreconditionError(DCMError, ValueError):
    """A required input is missing or malformed."""


class ConfigError(DCMError, ValueError):
    """A configuration or parameter document could not be loaded."""


class DatasetFormatError(DCMError, ValueError):
    """A dataset file is malformed; `line` is 1-based and counts the header."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class DegenerateFitError(DCMError, ValueError):
    """No latent class survives truncation."""


class SingularDesignError(DCMError, ValueError):
    """A back-solving regression has a rank-deficient design."""

    def __init__(self, message: str, item: int):
        super().__init__(message)
        self.item = item


class InconsistentCodingError(DCMError, ValueError):
    """No class-to-profile coding is consistent with the item partitions."""

    def __init__(self, message: str, items: list[int]):
        super().__init__(message)
        self.items = items


class UsageError(DCMError, ValueError):
    """Bad command-line or API usage."""


class SamplerFault(DCMError, RuntimeError):
    """The slice sampler reached an unrecoverable state."""

    def __init__(self, message: str, iteration: int | None = None, diagnostic: dict[str, Any] | None = None):
        super().__init__(message)
        self.iteration = iteration
        self.diagnostic = diagnostic or {}
