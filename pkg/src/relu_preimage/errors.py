"""Exception hierarchy shared by all analysis modules."""


class ReluPreimageError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(ReluPreimageError, ValueError):
    """Non-finite or wrongly shaped numeric input."""


class DegenerateSpectrum(ReluPreimageError):
    """A spectrum without any nonzero singular value."""


class InvalidProblem(ReluPreimageError, ValueError):
    """Malformed linear program (dimension mismatch, crossed bounds)."""


class SolverStalled(ReluPreimageError):
    """The simplex iteration cap was hit before a status was certified."""


class NotAReluOutput(ReluPreimageError, ValueError):
    """An activation vector with materially negative entries."""


class InconsistentOutput(ReluPreimageError):
    """The activation vector is not in the image of the layer."""


class BudgetExceeded(ReluPreimageError):
    """A combinatorial search would exceed its configured budget."""


class ProbeInfeasible(ReluPreimageError):
    """The invariance LP turned out infeasible even though x_star is feasible."""


class DegenerateRow(ReluPreimageError, ValueError):
    """A removed row of norm zero was selected as the correlation anchor."""


class NothingRemoved(ReluPreimageError, ValueError):
    """A correlation sweep was requested for an empty removal set."""


class ModelFormatError(ReluPreimageError):
    """Base class for model / vector file parse errors.

    ``line`` is 1-based; ``offset`` is a byte offset for binary blocks.
    """

    def __init__(self, message, path=None, line=None, offset=None):
        self.path = path
        self.line = line
        self.offset = offset
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"byte {offset}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class MalformedHeader(ModelFormatError):
    pass


class UnsupportedVersion(MalformedHeader):
    pass


class UnknownActivation(MalformedHeader):
    pass


class MalformedValue(ModelFormatError):
    pass


class NonFiniteValue(ModelFormatError):
    pass


class SizeMismatch(ModelFormatError):
    """Declared counts disagree with the number of values present."""


class DimensionMismatch(ModelFormatError):
    """Consecutive layers do not chain."""


class TruncatedFile(ModelFormatError):
    pass


class TrailingData(ModelFormatError):
    pass
