"""Exception types raised across the package."""


class InvalidInput(ValueError):
    """Argument violates an operation's precondition."""


class DatasetValidationError(InvalidInput):
    """A dataset failed validation.

    ``problems`` holds one human-readable line per offending item.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class EmptyResult(RuntimeError):
    """Discovery finished without any shapelet above the quality threshold."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ArtifactError(ValueError):
    """A persisted artifact is malformed or does not match its producer."""


class InputFormatError(ValueError):
    """A text input could not be parsed; ``line`` is 1-based when known."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = "" if source is None else f"{source}"
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
