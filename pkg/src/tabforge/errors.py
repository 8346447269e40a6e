"""Exception hierarchy shared by every tabforge module."""


class TabforgeError(Exception):
    """Base class for all errors raised by tabforge."""


class ConvergenceWarning(UserWarning):
    """An iterative solver hit its iteration cap; the partial result is returned."""


# ingestion / encoding

class MissingFile(TabforgeError, FileNotFoundError):
    pass


class HeaderMismatch(TabforgeError, ValueError):
    pass


class UnparsableCell(TabforgeError, ValueError):
    def __init__(self, row: int, column: str, text: str):
        self.row = row
        self.column = column
        self.text = text
        super().__init__(f"cannot parse {text!r} as a number (row {row}, column {column!r})")


class NullPresent(TabforgeError, ValueError):
    pass


class NoTargetColumn(TabforgeError, ValueError):
    pass


class UnknownColumn(TabforgeError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NonNumericColumn(TabforgeError, TypeError):
    pass


class AllNull(TabforgeError, ValueError):
    pass


class ZeroBins(TabforgeError, ValueError):
    pass


# splitting / resampling

class DegenerateRatio(TabforgeError, ValueError):
    pass


class EmptyClass(TabforgeError, ValueError):
    pass


class SingleClass(TabforgeError, ValueError):
    pass


# feature selection

class ConstantTarget(TabforgeError, ValueError):
    pass


class NegativeFeature(TabforgeError, ValueError):
    pass


class EmptyContingency(TabforgeError, ValueError):
    pass


class NKeepTooLarge(TabforgeError, ValueError):
    pass


class InvalidConfig(TabforgeError, ValueError):
    pass


class VerdictShapeMismatch(TabforgeError, ValueError):
    pass


# models

class InvalidParam(TabforgeError, ValueError):
    def __init__(self, name: str, value, allowed: str):
        self.name = name
        self.value = value
        self.allowed = allowed
        super().__init__(f"invalid value {value!r} for {name!r}; allowed: {allowed}")


class ShapeMismatch(TabforgeError, ValueError):
    pass


# evaluation

class KTooLarge(TabforgeError, ValueError):
    pass


class AllCellsFailed(TabforgeError, RuntimeError):
    pass


class LengthMismatch(TabforgeError, ValueError):
    pass


class NonBinaryValue(TabforgeError, ValueError):
    pass


class EmptyMatrix(TabforgeError, ValueError):
    pass


# orchestration

class ConfigError(TabforgeError, ValueError):
    pass


class StageError(TabforgeError, RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {type(cause).__name__}: {cause}")
