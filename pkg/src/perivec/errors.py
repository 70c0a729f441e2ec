"""Exception types shared across the package."""


class OrbitError(Exception):
    """Base class for every error raised by this package."""


class NonPositiveRadiusError(OrbitError):
    """A radius argument was zero, negative, or not finite."""


class InvalidPotentialError(OrbitError, ValueError):
    """A potential was constructed or parsed with invalid parameters."""


class InvalidOrbitError(OrbitError, ValueError):
    """Orbit parameters violate a constructor invariant (e.g. L = 0)."""


class NoMinimumFoundError(OrbitError):
    """The effective potential has no interior minimum in the search range."""


class NotBoundedError(OrbitError):
    """The requested operation needs a bounded orbit."""


class CircularDegenerateError(OrbitError):
    """Turning points coincide (or nearly so); the radial motion is circular."""


class OutsideRadialRangeError(OrbitError):
    """A radius lies outside the allowed [r_min, r_max] band of the orbit."""


class ToleranceNotReachedError(OrbitError):
    """Adaptive quadrature exhausted its refinement levels."""


class StepFailureError(OrbitError):
    """The adaptive stepper underflowed its minimum step size."""


class AmbiguousApsisError(OrbitError):
    """A detected radial extremum is near neither turning point."""


class InvalidPhaseError(OrbitError, ValueError):
    """A phase index was smaller than 1."""


class ApsidalSingularityError(OrbitError):
    """Coefficient evaluation was requested at (or too close to) an apsis."""


class NotHookeError(OrbitError):
    """The operation is defined only for the isotropic Hooke potential."""
