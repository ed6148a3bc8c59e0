"""Exception hierarchy shared by all treexplain modules.

Three broad categories exist so the CLI can map failures to stable exit
codes: bad input data (DataError), bad configuration (ConfigError), and
failures arising at run time (ComputationError).
"""


class TreexplainError(Exception):
    """Base class for all treexplain errors."""


class DataError(TreexplainError):
    """Problems with input data files or dataset contents."""


class ConfigError(TreexplainError):
    """Invalid configuration: specs, grids, flags."""


class ComputationError(TreexplainError):
    """Failures raised while computing on otherwise valid inputs."""


# --- data loading / splitting ---

class MissingColumnError(DataError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"column not found: {column!r}")


class NonNumericCellError(DataError):
    def __init__(self, row, col, text):
        self.row = row
        self.col = col
        super().__init__(f"non-numeric cell at row {row}, column {col}: {text!r}")


class EmptyFileError(DataError):
    pass


class SingleClassError(DataError):
    pass


class DegenerateSplitError(DataError):
    pass


class TooManyFoldsError(DataError):
    pass


# --- models ---

class EmptyIndexSetError(ComputationError):
    pass


class DimensionMismatchError(ComputationError):
    def __init__(self, expected, got):
        super().__init__(f"expected {expected} features, got {got}")


class SingleClassTrainSetError(DataError):
    pass


class InvalidSpecError(ConfigError):
    pass


class BadClassError(ComputationError):
    pass


# --- explanation ---

class NearZeroDenominatorError(ComputationError):
    """Attribution scalar too close to zero for a weight to be defined."""


class NoFeaturesUsedError(ComputationError):
    """The fitted model never splits, so no feature weights exist."""


class AllInstancesSkippedError(ComputationError):
    """More than half the instances had near-zero denominators."""


# --- selection ---

class EmptyAxisError(ConfigError):
    pass
