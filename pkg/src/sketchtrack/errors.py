"""Exception types shared across the package."""


class SketchTrackError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(SketchTrackError):
    """A scenario or tracker configuration value is invalid."""


class EmptySketchError(SketchTrackError):
    """A sketch polygon encloses no grid particle."""


class DegenerateLikelihoodError(SketchTrackError):
    """A fused likelihood vector carries no mass anywhere on the grid."""


class InfeasibleMomentsError(SketchTrackError):
    """Moment pair cannot come from any Beta distribution (var >= mean*(1-mean))."""


class ProjectionError(SketchTrackError):
    """A pixel ray does not intersect the ground plane in front of the camera."""
