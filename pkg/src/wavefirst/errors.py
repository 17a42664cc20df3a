"""Exception types shared across the package."""


class WavefirstError(Exception):
    """Base class for all package-specific errors."""


class InvalidGrid(WavefirstError):
    """Grid dimensions, wavelength or boundary setup violate a constraint."""


class DimensionMismatch(WavefirstError):
    """Vector or operator sizes are inconsistent with the grid."""


class SingularSystem(WavefirstError):
    """The forward system could not be factorized or solved accurately."""


class SingularReducedSystem(WavefirstError):
    """The pinned field constraints leave a singular reduced system."""


class NonConvergence(WavefirstError):
    """An iterative solve exhausted its budget without reaching tolerance."""


class NoSuchMode(WavefirstError):
    """The requested guided mode does not exist for the given slice."""


class RequiresPeriodic(WavefirstError):
    """The operation needs periodic transverse boundaries."""


class PortInPml(WavefirstError):
    """A source port was placed inside an absorbing layer."""


class PlaneInPml(WavefirstError):
    """A measurement plane was placed inside an absorbing layer."""


class ZeroTarget(WavefirstError):
    """The comparison target is identically zero on the requested plane."""


class ConfigError(WavefirstError):
    """A run configuration failed to parse or validate."""


class NonConvergenceWarning(UserWarning):
    """Issued when a sub-solver returns its best iterate below tolerance."""
