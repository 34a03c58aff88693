"""Exception types raised by the geometry engine."""


class GeometryError(Exception):
    """Base class for all engine errors."""


class NonInvertibleMetricError(GeometryError):
    """Metric matrix is singular or too badly conditioned to invert."""


class ChartBoundaryError(GeometryError):
    """A point (or a stencil point around it) lies outside the chart."""


class DegeneratePlaneError(GeometryError):
    """Two tangent vectors do not span a plane."""


class NotASubmersionError(GeometryError):
    """Jacobian of a map is rank deficient at a point."""


class InvalidWarpingError(GeometryError):
    """Warping function is not strictly positive."""


class DimensionError(GeometryError):
    """Operation is undefined in the dimension of the given chart."""


class HypothesisViolation(GeometryError):
    """Inputs do not satisfy the hypotheses a check relies on."""
