"""Exception hierarchy for uniquant.

Errors fall into two families that the CLI maps onto exit codes:
configuration/contract errors (exit code 2) and numerical failures (exit code 3).
"""


class UniquantError(Exception):
    """Base class of every error raised by uniquant."""

    exit_code: int = 3


class ConfigError(UniquantError):
    """Invalid input, parameter or configuration."""

    exit_code = 2


class FormatError(ConfigError):
    """Malformed measure file (dimension mismatch, negative weight, bad number)."""


class InvalidSpec(ConfigError):
    """Malformed or out-of-range generator specification."""


class InvalidParameter(ConfigError):
    """A numerical parameter (n, p, d, ...) is outside its domain."""


class InvalidRadius(InvalidParameter):
    """Negative truncation radius."""


class InvalidOrder(InvalidParameter):
    """Moment order q not strictly larger than the transport order p."""


class IndivisibleCount(InvalidParameter):
    """Number of points is not a multiple of the number of classes."""


class DivergentSeries(InvalidParameter):
    """Zeta evaluated at s <= 1."""


class EmptyMeasure(ConfigError):
    """Measure without atoms of positive weight."""


class UnbalancedMasses(ConfigError):
    """Transport between measures of different total mass."""


class ProblemTooLarge(ConfigError):
    """Problem size beyond the exact solver or the brute-force search limits."""


class NumericalFailure(UniquantError):
    """A guarantee that holds in exact arithmetic was violated numerically."""

    exit_code = 3


class InsufficientMass(NumericalFailure):
    """The restriction cube carries less mass than requested."""


class InsufficientTotalMass(NumericalFailure):
    """Total mass below 1/n, so the pigeonhole argument does not apply."""


class CertificateViolation(NumericalFailure):
    """The transport solver did not return a certified optimal plan."""
