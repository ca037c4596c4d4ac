"""Exception hierarchy shared by all ddops modules."""


class DdopsError(Exception):
    """Base class for all errors raised by this package."""


# -- geometry --------------------------------------------------------------

class OrderingError(DdopsError):
    """Cut positions or interval bounds are not in the required order."""


class RangeError(DdopsError):
    """A coordinate falls outside the admissible range."""


class NonPositiveError(DdopsError):
    """A length-like parameter is zero or negative."""


class GeometryError(DdopsError):
    """Geometric entities do not relate as required (e.g. patch not on a face)."""


# -- grids -----------------------------------------------------------------

class OutOfDomainError(DdopsError):
    """A query point lies outside the field's box.

    Carries ``point_index`` of the first offending point.
    """

    def __init__(self, message, point_index=None):
        super().__init__(message)
        self.point_index = point_index


class GridMismatchError(DdopsError):
    """Grids that must share nodes on a patch do not coincide there."""


# -- linear solves ----------------------------------------------------------

class SingularSystemError(DdopsError):
    """The discrete system has no unique solution (e.g. pure-Neumann problem)."""


class ConvergenceError(DdopsError):
    """An iterative linear solve stalled; carries the final residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PortError(DdopsError):
    """A current port does not lie on an exterior face of the geometry."""


# -- random fields ----------------------------------------------------------

class FactorizationError(DdopsError):
    """Covariance factorization failed; the jitter is too small."""


# -- networks & metrics ------------------------------------------------------

class ShapeError(DdopsError):
    """Array shapes do not match the declared layer or sample layout."""


class ZeroNormError(DdopsError):
    """A reference vector has zero norm; relative error is undefined."""

    def __init__(self, message, sample_index=None):
        super().__init__(message)
        self.sample_index = sample_index


class DivergenceError(DdopsError):
    """Training loss or iteration residual became non-finite or grows steadily."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class FormatError(DdopsError):
    """A serialized file is malformed; carries the byte offset when known."""

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class VersionError(DdopsError):
    """A serialized file has an unsupported format version."""


class CheckpointNotFoundError(DdopsError):
    """A referenced checkpoint file does not exist."""


# -- domain decomposition -----------------------------------------------------

class NotOverlappingError(DdopsError):
    """The scheme requires an overlapping partition but got none."""


class OverlapError(DdopsError):
    """The scheme requires a non-overlapping partition but subdomains overlap."""


class SolverError(DdopsError):
    """A subdomain solve failed; carries the subdomain label."""

    def __init__(self, message, label=None):
        super().__init__(message)
        self.label = label


class DerivativeUnavailableError(DdopsError):
    """A transmission rule needs a normal derivative that cannot be formed."""


# -- pipelines ----------------------------------------------------------------

class DomainError(DdopsError):
    """A data transform received a value outside its domain."""


class AlignmentError(DdopsError):
    """Mapped trunk points leave the target dataset's box."""


class ZeroFluxError(DdopsError):
    """The port flux is numerically zero; resistance is undefined."""


class ZeroTrueValueError(DdopsError):
    """A true reference value is zero; relative error is undefined."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


# -- configuration --------------------------------------------------------------

class ConfigError(DdopsError):
    """A run configuration is invalid; carries the offending key path."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
