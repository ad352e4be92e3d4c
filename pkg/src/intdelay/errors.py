"""Exception hierarchy shared by the analysis modules."""


class IntDelayError(Exception):
    """Base class for every error raised by :mod:`intdelay`."""


class ValidationError(IntDelayError, ValueError):
    """A system description violates a model invariant."""

    code = "ValidationError"


class NonPositiveStep(ValidationError):
    code = "NonPositiveStep"


class ShapeMismatch(ValidationError):
    code = "ShapeMismatch"


class BoundOrderViolation(ValidationError):
    code = "BoundOrderViolation"


class ZeroKnots(ValidationError):
    code = "ZeroKnots"


class HorizonMismatch(ValidationError):
    code = "HorizonMismatch"


class NonVanishingTail(ValidationError):
    """The midpoint spline does not vanish beyond the horizon.

    For degree ``n0 >= 1`` the truncated-power basis functions keep a
    polynomial tail past ``N*h``.  The closed-form transform used by the
    frequency pipeline equals the finite-support transform only when the
    midpoint kernel's tail cancels, i.e. ``sum_k d_k k**m == 0`` for
    ``m = 0..n0``.
    """

    code = "NonVanishingTail"


class IndexOutOfRange(IntDelayError, IndexError):
    code = "IndexOutOfRange"


class DegenerateZeroPolynomial(IntDelayError):
    """The crossover polynomial vanishes identically."""

    code = "DegenerateZeroPolynomial"


class RhoTooLarge(IntDelayError):
    code = "RhoTooLarge"


class InconsistentState(IntDelayError):
    code = "InconsistentState"


class Defective(IntDelayError):
    code = "Defective"


class NonTermination(IntDelayError):
    code = "NonTermination"


class CounterDisagreement(IntDelayError):
    code = "CounterDisagreement"


class StepTooCoarse(IntDelayError, ValueError):
    code = "StepTooCoarse"


class Degenerate(IntDelayError):
    """A Nyquist locus passes through (or too close to) the critical point."""

    code = "Degenerate"


class PairingAmbiguity(IntDelayError):
    code = "PairingAmbiguity"


class ParseError(IntDelayError, ValueError):
    code = "ParseError"


class TangentCrossing(IntDelayError):
    """A crossover value sits on the critical point within tolerance."""

    code = "TangentCrossing"
