"""Exception hierarchy for the verification engine."""


class SlantmapError(Exception):
    """Base class for all engine errors."""


class RankDeficient(SlantmapError):
    """A supplied basis is linearly dependent under its metric."""


class SingularMetric(SlantmapError):
    """A metric matrix is not symmetric positive definite."""


class DimensionMismatch(SlantmapError):
    """Operands carry incompatible dimensions."""


class RankOutOfRange(SlantmapError):
    """A map differential has rank 0 or full rank, so no proper splitting exists."""


class IsometryViolation(SlantmapError):
    """The differential is not a linear isometry on the horizontal space."""


class DualityViolation(SlantmapError):
    """The two independent constructions of a shape operator disagree."""


class PreconditionUnverified(SlantmapError):
    """A geometric hypothesis asserted by the caller fails its numerical diagnostic."""


class ClusterAmbiguity(SlantmapError):
    """The slant operator spectrum does not split into at most two angle clusters."""


class Unclassifiable(SlantmapError):
    """A slant profile matches no row of the classification table."""


class InternalInconsistency(SlantmapError):
    """Two routes that must agree by theorem disagree beyond tolerance."""


class IncompatibleParameters(SlantmapError):
    """Constrained-minimizer parameters violate the compatibility condition."""


class DegenerateDimension(SlantmapError):
    """The rank is too small for the requested curvature bound."""


class FixtureMissing(SlantmapError):
    """An unknown fixture id was requested."""


class IoFailure(SlantmapError):
    """Reading or writing a descriptor or report failed."""
