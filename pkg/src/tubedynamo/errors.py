"""Exception hierarchy.

ConfigError marks bad user input (CLI exit code 1). NumericalError and its
subclasses mark failures of a computation that was asked to run on a valid
configuration (CLI exit code 2).
"""


class ConfigError(ValueError):
    """Invalid configuration: unknown key, malformed value, bad sweep."""


class NumericalError(Exception):
    """A computation could not be carried out at the requested inputs."""


class DegenerateMetricError(NumericalError):
    """Metric is not positive-definite (or numerically indistinguishable from it)."""


class DomainError(NumericalError):
    """Evaluation point, or a finite-difference stencil point, left the chart domain."""


class DegeneratePlaneError(NumericalError):
    """The two tangent vectors do not span a 2-plane."""


class SingularityError(NumericalError):
    """A formula hit one of its singular points (zero torsion, tan(theta) pole,
    zero velocity denominator, loss of metric positivity during a flow)."""
