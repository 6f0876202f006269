"""Exception types shared across the package."""


class HeatgeoError(Exception):
    """Base class for all package errors."""


class AntipodalElement(HeatgeoError):
    """Principal logarithm requested at the antipode (w = -1)."""


class OutsideChart(HeatgeoError):
    """Second-kind coordinate solve left the configured chart."""


class TruncationMismatch(HeatgeoError):
    """Product element and coefficient scheme disagree on the factor count."""


class GadgetDegenerate(HeatgeoError):
    """Commutator gadget collapsed to the identity."""


class RootBracketFailure(HeatgeoError):
    """Bisection could not bracket the requested gadget value."""


class DimensionOverflow(HeatgeoError):
    """Coefficient space exceeds the configured size cap."""


class EigSolverFailure(HeatgeoError):
    """Generalized eigenvalue solve did not converge."""


class QuadratureUnconverged(HeatgeoError):
    """Successive quadrature refinements failed to settle."""


class InadmissibleEpsilon(HeatgeoError):
    """Fractional power outside the admissible range for the given lambda."""


class SchemeFormatError(HeatgeoError):
    """Malformed scheme or run configuration."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class BoundViolation(HeatgeoError):
    """A numerically asserted inequality failed; carries the witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness or {}
