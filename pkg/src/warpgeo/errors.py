"""Exception hierarchy for the warpgeo engine."""


class WarpGeoError(Exception):
    """Base class for all engine errors."""


class DomainError(WarpGeoError):
    """Point lies outside the model-space domain (e.g. hyperbolic disk)."""


class OutOfDomain(WarpGeoError):
    """Parameter point outside the declared parameter rectangle."""


class BadInput(WarpGeoError):
    """Structurally invalid input (lengths, monotonicity, missing data)."""


class DegenerateJet(WarpGeoError):
    """First partials fail the immersion regularity test."""


class OrientationAmbiguous(WarpGeoError):
    """Angle function vanishes; a sign-based orientation cannot be resolved."""


class DivByZeroD(WarpGeoError):
    """Complex first-form determinant D is numerically zero."""


class NotPositivelyCurved(WarpGeoError):
    """A second-form conformal chart was requested where K_e <= 0."""


class QuadratureFail(WarpGeoError):
    """Adaptive quadrature did not reach the requested tolerance."""


class NotConstantCurvature(WarpGeoError):
    """Curvature spread over the sample grid exceeds the constancy threshold."""


class NotMinimal(WarpGeoError):
    """Mean curvature is not zero within tolerance."""


class BadScale(WarpGeoError):
    """Metric scaling constant must be positive."""


class AffinityBroken(WarpGeoError):
    """The affine model for the curvature/second-derivative relation failed
    its post-verification; signals a modeling error, not a numerical one."""


class SlopeVanishes(WarpGeoError):
    """Curvature is insensitive to the profile second derivative."""


class NoBoundaryReached(WarpGeoError):
    """Shooting run ended without the profile meeting the t = 0 slice
    inside the radial window (includes loss of the graph property)."""


class StepFailure(WarpGeoError):
    """ODE integrator failed to advance."""
