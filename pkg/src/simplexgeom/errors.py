"""Exception hierarchy.

Every error raised on bad input derives from :class:`GeometryError`, which is
itself a ``ValueError`` so callers that only care about "bad argument" can
catch the builtin.
"""


class GeometryError(ValueError):
    pass


class NonPositiveWeight(GeometryError):
    pass


class NotNormalized(GeometryError):
    pass


class OutOfRange(GeometryError):
    pass


class IndexOutOfRange(GeometryError):
    pass


class IdenticalIndices(GeometryError):
    pass


class DimensionMismatch(GeometryError):
    pass


class NotTangent(GeometryError):
    """Ambient components of a tangent vector do not sum to zero."""


class InvalidPartition(GeometryError):
    pass


class InvalidPatch(GeometryError):
    pass


class NonPositiveCoordinate(GeometryError):
    pass


class NegativeValue(GeometryError):
    pass


class DegenerateDenominator(GeometryError):
    pass


class PrereqFailed(GeometryError):
    """A reconstruction was requested for a family that fails its hypotheses.

    The failing :class:`~simplexgeom.verify.CheckReport` is attached as
    ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InfeasibleConstraints(GeometryError):
    pass


class EmptySample(GeometryError):
    pass
