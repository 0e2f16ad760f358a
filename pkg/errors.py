from typing import Optional


class GeometryError(Exception):
    """Base class of every error raised by the library.

    Subclasses belong to one of three families which decide the CLI exit code.
    """
    exit_code = 3

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.message = message
        self.residual = residual

    def to_dict(self) -> dict:
        d = {"error": type(self).__name__, "message": self.message}
        if self.residual is not None:
            d["residual"] = float(self.residual)
        return d


# Families
class InputError(GeometryError):
    exit_code = 1


class PreconditionError(GeometryError):
    exit_code = 2


class NumericalError(GeometryError):
    exit_code = 3


# Input errors
class InvalidChain(InputError):
    pass


class MalformedInstance(InputError):
    pass


# Mathematical preconditions
class DegenerateCircle(PreconditionError):
    pass


class FramingViolated(PreconditionError):
    pass


class DegeneratePolygon(PreconditionError):
    pass


class EvenOrder(PreconditionError):
    pass


class OddOrder(PreconditionError):
    pass


class NoFraming(PreconditionError):
    pass


class EqualSignedRadii(PreconditionError):
    pass


class InconsistentClosure(PreconditionError):
    pass


class NonGenericChain(PreconditionError):
    pass


class NonGenericFramedPolygon(PreconditionError):
    pass


class VanishingSine(PreconditionError):
    pass


class SingularAngle(PreconditionError):
    pass


class NotHorizontal(PreconditionError):
    pass


class UnsupportedN(PreconditionError):
    pass


class NoTangent(PreconditionError):
    pass


class InfeasibleRadii(PreconditionError):
    pass


class PointInside(PreconditionError):
    pass


class ConcentricCircles(PreconditionError):
    pass


# Numerical failures
class OrientationObstruction(NumericalError):
    pass


class StepTooLarge(NumericalError):
    pass


class NonGeometric(NumericalError):
    pass


class InvariantLost(NumericalError):
    pass


class NoReturn(NumericalError):
    pass
