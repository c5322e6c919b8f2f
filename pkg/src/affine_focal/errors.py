"""Exception hierarchy.

Every numerical failure raised by the library derives from
:class:`AffineFocalError`; the CLI maps these to exit code 3.
"""


class AffineFocalError(Exception):
    """Base class for all library errors."""

    #: short invariant name reported by the CLI
    invariant = "numerical"


class DimensionMismatch(AffineFocalError, ValueError):
    invariant = "dimension"


class GridTooCoarse(AffineFocalError, ValueError):
    invariant = "grid"


class NonUniformGrid(AffineFocalError, ValueError):
    invariant = "grid"


class DivergentODE(AffineFocalError):
    invariant = "ode"


class InflectionPoint(AffineFocalError):
    invariant = "non-degeneracy"

    def __init__(self, message, u=None):
        super().__init__(message)
        self.u = u


class DegenerateTorsion(AffineFocalError):
    invariant = "non-degeneracy"


class NotClosed(AffineFocalError):
    invariant = "closedness"


class DegeneratePoint(AffineFocalError):
    invariant = "non-degeneracy"

    def __init__(self, message, u=None):
        super().__init__(message)
        self.u = u


class ContainmentError(AffineFocalError):
    invariant = "containment"


class GaugeError(AffineFocalError):
    invariant = "gauge ODE"


class EmptyLocus(AffineFocalError):
    invariant = "focal locus"


class InsufficientJets(AffineFocalError):
    invariant = "jets"


class DegenerateMetric(AffineFocalError):
    invariant = "metric"


class SingularSystem(AffineFocalError):
    invariant = "linear system"


class NonSimpleEigenvalue(AffineFocalError):
    invariant = "eigenvalue"


class EmptySection(AffineFocalError):
    invariant = "section"


class DegenerateTangent(AffineFocalError):
    invariant = "non-degeneracy"


class ApexOnHyperplane(AffineFocalError):
    invariant = "apex"


class SpecError(ValueError):
    """Malformed or unsupported input specification (CLI exit code 2)."""
