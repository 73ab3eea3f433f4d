"""Exception types shared across the package."""


class BlsatError(Exception):
    """Base class for all package errors."""


class InvalidInput(BlsatError):
    """Malformed or out-of-domain input."""


class NotPositiveDefinite(InvalidInput):
    """A matrix required to be positive definite is not."""


class NotPositiveSemidefinite(InvalidInput):
    """A matrix required to be positive semidefinite is not."""


class NotConvex(InvalidInput):
    """A potential required to be convex has a negative second difference."""


class UnsupportedDatum(BlsatError):
    """The operation is restricted to a narrower family of data."""


class UnsupportedScale(BlsatError):
    """The requested problem size exceeds the supported desk scale."""


class GridTooSmall(BlsatError):
    """A grid does not contain the mass needed for the requested transform."""


class Infeasible(BlsatError):
    """No point satisfying the constraints was found."""


class Unbounded(BlsatError):
    """The objective grows without bound over the feasible set."""


class ConfigError(BlsatError):
    """A configuration document failed validation."""
