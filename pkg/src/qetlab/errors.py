"""Exception and warning types shared across the package."""


class QetlabError(Exception):
    """Base class for all package-specific errors."""


class InvalidGeometryError(QetlabError, ValueError):
    """A smearing profile or integration domain is geometrically invalid."""


class GeometryMismatchError(QetlabError, ValueError):
    """Smearing profiles with incompatible geometry were combined."""


class NormalizationError(QetlabError, ValueError):
    """A detector state failed its normalization check."""


class CausalityError(QetlabError, ValueError):
    """The receiver's smearing is not contained in the sender's lightcone."""


class DimensionError(QetlabError, ValueError):
    """An operation was requested in an unsupported spacetime dimension."""


class NonconvergenceError(QetlabError, ArithmeticError):
    """An adaptive quadrature failed to reach the requested tolerance."""


class ExtrapolationError(QetlabError, ArithmeticError):
    """A cutoff-removal sequence did not converge while extrapolating."""


class ResolutionError(QetlabError, ValueError):
    """A mode lattice is too coarse or too small for the requested profile."""


class NoNegativeRegionError(QetlabError, ValueError):
    """No negative-energy well exists inside the requested window."""


class NoFeasiblePointError(QetlabError, ValueError):
    """An optimization found no candidate satisfying the constraints."""


class ConfigError(QetlabError, ValueError):
    """A run configuration failed to parse or validate."""


class SupportTruncationWarning(UserWarning):
    """An integration grid visibly truncates the support of the integrand."""
