"""Exception types shared across the package."""


class IngestionError(ValueError):
    """A corpus source contained data that cannot be encoded.

    Carries the offending sequence id and token so callers (and the CLI)
    can point at the exact input line.
    """

    def __init__(self, message: str, *, sequence_id: str | None = None, token: str | None = None):
        super().__init__(message)
        self.sequence_id = sequence_id
        self.token = token


class StateError(RuntimeError):
    """An operation was called on an object in the wrong state."""
