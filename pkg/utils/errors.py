"""
Error Types
Exception hierarchy shared by the geometry utilities and the services.
GeometryError marks bad or degenerate input, ComputationError marks a
numeric procedure that ran and failed.
"""


class KleinianError(Exception):
    """Root of every error raised by this package."""


class GeometryError(KleinianError, ValueError):
    """Input geometry is degenerate or outside an operation's domain."""


class ComputationError(KleinianError, RuntimeError):
    """A numeric procedure ran but could not produce a result."""


# mobius
class SingularMatrix(GeometryError):
    pass


class IdentityHasNoIsolatedFixedPoints(GeometryError):
    pass


class IdentityMap(GeometryError):
    pass


class FixesInfinity(GeometryError):
    pass


# circlespace
class InfiniteCenter(GeometryError):
    pass


class IsLine(GeometryError):
    pass


class DegenerateCircle(GeometryError):
    pass


class CoincidentPoints(GeometryError):
    pass


class CoincidentCircles(GeometryError):
    pass


class NoFrame(GeometryError):
    pass


class EllipticUnsupported(GeometryError):
    pass


class DegenerateInput(GeometryError):
    pass


# grouprep
class UnknownGenerator(GeometryError):
    pass


class WordSyntaxError(GeometryError):
    pass


class NoConvergence(ComputationError):
    pass


class SingularJacobian(ComputationError):
    pass


# chains
class MarkersDegenerate(GeometryError):
    pass


class ChainInvalid(ComputationError):
    pass


class DiscComputationFailed(ComputationError):
    pass


# polygon
class DisconnectedArrangement(ComputationError):
    pass


class AmbiguousRegion(ComputationError):
    pass


# funddom
class FramesNotOnPencil(GeometryError):
    pass


class ParabolicUnsupported(GeometryError):
    pass


class ChainNotOnPleatingVariety(ComputationError):
    pass


class ConstructionDegenerate(ComputationError):
    pass


class HolonomyUndefined(ComputationError):
    pass


class SubarcEmpty(ComputationError):
    pass


class StepFailed(ComputationError):
    """A twisting step failed; `step` is the step number 1..5."""

    def __init__(self, step: int, message: str):
        super().__init__(f"step {step} failed: {message}")
        self.step = step


# render
class BudgetExceeded(ComputationError):
    pass


class IoFailure(ComputationError):
    pass


# fixtures
class UnknownFixture(GeometryError):
    pass
