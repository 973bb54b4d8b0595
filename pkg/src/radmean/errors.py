"""Exception types raised across the package."""


class RadmeanError(ValueError):
    """Base class for input/contract violations."""


class DegenerateInput(RadmeanError):
    pass


class PointOutside(RadmeanError):
    pass


class PerturbationFailed(RadmeanError):
    pass


class ConvexityLost(RadmeanError):
    pass


class NotGeneralPosition(RadmeanError):
    pass


class DirectionOnConeBoundary(RadmeanError):
    pass


class ZeroDirection(RadmeanError):
    pass


class ZeroVector(RadmeanError):
    pass


class OutsideOpenCone(RadmeanError):
    pass


class InvalidP(RadmeanError):
    pass


class BadSampleCount(RadmeanError):
    pass


class TooFewPoints(RadmeanError):
    pass


class ParallelLines(RadmeanError):
    pass


class QuadratureNoConvergence(RadmeanError):
    pass


class SignStructureViolated(RuntimeError):
    """Alpha coefficients without exactly one positive entry.

    Never expected for a valid convex input; signals a numerical problem.
    """


class ContinuityViolation(RuntimeError):
    """Adjacent sector closed forms disagree on their shared boundary ray."""
