"""Exception and warning classes shared across phonebench."""


class PhonebenchError(Exception):
    """Base class for all errors raised by phonebench."""


class ParseError(PhonebenchError, ValueError):
    """A file could not be parsed; ``line`` is 1-based when known."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class InventoryError(ParseError):
    """A label is missing from, or malformed in, a phoneme inventory."""


class RangeError(PhonebenchError, ValueError):
    """A time or index range is empty or falls outside the audio."""


class GeometryError(PhonebenchError, ValueError):
    """An array has the wrong length or number of columns."""


class DataError(PhonebenchError, ValueError):
    """Input data is empty or otherwise unusable."""


class NumericError(PhonebenchError, ValueError):
    """Input contains NaN or infinite values."""


class LabelError(PhonebenchError, ValueError):
    """Training labels are unusable (e.g. a single class)."""


class SpecError(PhonebenchError, ValueError):
    """A declarative spec (synthesis, representation, model) is invalid."""


class ConfigError(PhonebenchError, ValueError):
    """A run configuration or command-line option is invalid."""


class ConvergenceError(PhonebenchError, RuntimeError):
    """An iterative solver hit its iteration cap before converging."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        if self.diagnostics:
            detail = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
            message = f"{message} ({detail})"
        super().__init__(message)


class RenderError(PhonebenchError, ValueError):
    """A report cannot be rendered, typically because grid cells are missing."""


class FormatError(ParseError):
    """A binary artifact has a bad magic number, version or payload."""


class PaddingWarning(UserWarning):
    """A slice ran past the end of the audio and was zero-padded."""


class SmallClassWarning(UserWarning):
    """A class has fewer members than there are cross-validation folds."""
