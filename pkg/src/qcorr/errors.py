"""Exception types shared across the package."""


class QcorrError(Exception):
    """Base class for all package-specific errors."""


class InvalidMatrix(QcorrError):
    """Matrix carrier is malformed (wrong shape, non-finite entries)."""


class NotHermitian(QcorrError):
    """Hermiticity tolerance (1e-10 entrywise) violated."""


class NotPSD(QcorrError):
    """An eigenvalue fell below the -1e-10 clamp threshold."""


class ConvergenceFailure(QcorrError):
    """Eigenvalue iteration failed to converge."""


class DimensionMismatch(QcorrError):
    """Operand dimensions are incompatible."""


class OutOfRange(QcorrError):
    """Numeric argument outside its documented range."""


class InvalidDensityMatrix(QcorrError):
    """Matrix is not Hermitian, positive semidefinite and unit trace."""


class RankTooSmall(QcorrError):
    """Requested ensemble cardinality is below the state's rank."""


class BadPartition(QcorrError):
    """Index groups do not partition the expected range."""


class ConfigInvalid(QcorrError):
    """Optimizer configuration fails validation."""


class MapNotUnital(QcorrError):
    """Map expected to be unital but alpha(1) != 1."""


class WellDefinednessFailure(QcorrError):
    """Intertwiner data is inconsistent, signalling a non-positive map."""


class ParseError(QcorrError):
    """JSON input could not be interpreted; message names the field."""
