"""Exception hierarchy shared across the package."""


class PdmError(Exception):
    """Base class for all package errors."""


class DataError(PdmError):
    pass


class EmptyFile(DataError):
    pass


class MissingColumn(DataError):
    def __init__(self, column):
        super().__init__(f"missing column {column!r}")
        self.column = column


class HeaderMismatch(DataError):
    pass


class TypeParseError(DataError):
    """A cell could not be parsed. ``row`` is the 0-based record index."""

    def __init__(self, row, column, value, line=None):
        where = f"row {row}" + (f" (line {line})" if line is not None else "")
        super().__init__(f"{where}, column {column!r}: cannot parse {value!r}")
        self.row = row
        self.column = column
        self.value = value


class DegenerateClass(DataError):
    pass


class UnknownCategory(DataError, ValueError):
    pass


class TooFewMinority(DataError):
    pass


class KTooLarge(PdmError, ValueError):
    pass


class EmptyNode(PdmError, ValueError):
    pass


class DegenerateLabels(PdmError):
    pass


class SingularCovariance(PdmError):
    pass


class NonConvergence(UserWarning):
    """Warning: an iterative solver stopped before reaching its tolerance."""


class DimensionMismatch(PdmError, ValueError):
    pass


class DegenerateBootstrap(PdmError):
    pass


class LengthMismatch(PdmError, ValueError):
    pass


class SingleClass(PdmError, ValueError):
    pass


class BadK(PdmError, ValueError):
    pass


class TooFewModels(PdmError):
    pass


class MissingModel(PdmError):
    pass


class ConfigError(PdmError):
    pass


class CvFoldError(PdmError):
    """A cross-validation fold failed; carries the fold coordinates."""

    def __init__(self, repetition, fold, cause):
        super().__init__(f"repetition {repetition}, fold {fold}: {cause}")
        self.repetition = repetition
        self.fold = fold
