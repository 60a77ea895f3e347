"""Error types shared across the package."""


class ConfigurationError(ValueError):
    """A config field is invalid or inconsistent.

    The message always names the offending field so CLI users can fix
    their invocation without reading a traceback.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ResourceLimitError(RuntimeError):
    """An experiment would exceed a configured resource cap."""
