"""Piecewise-conserved perihelion vectors for planar central-force orbits.

The package computes, for any bounded orbit in a central potential with
nonzero angular momentum: the turning points of the radial motion, the
apsidal angle and radial period by singularity-aware quadrature, the
trajectory by adaptive integration with apsis event detection, and the
generalized (FBRS) perihelion vector built from closed-form coefficient
functions.  That vector is constant along each radial arc and rotates by
twice the apsidal angle once per radial period, degenerating to the
globally conserved Laplace-Runge-Lenz vector for the Kepler potential
and to a sign-alternating axis vector for the isotropic oscillator.
"""
from .dynamics import (
    ApsisEvent,
    ApsisKind,
    ConservationRecord,
    Trajectory,
    TrajectorySample,
    branch_angle,
    detect_apsides,
    integrate_orbit,
    velocity_at_radius,
    write_trajectory_csv,
)
from .errors import (
    AmbiguousApsisError,
    ApsidalSingularityError,
    CircularDegenerateError,
    InvalidOrbitError,
    InvalidPhaseError,
    InvalidPotentialError,
    NoMinimumFoundError,
    NonPositiveRadiusError,
    NotBoundedError,
    NotHookeError,
    OrbitError,
    OutsideRadialRangeError,
    StepFailureError,
    ToleranceNotReachedError,
)
from .perihelion import (
    Gauge,
    JumpEvent,
    VectorSample,
    VectorTrace,
    assemble_vector,
    assemble_vector_phase_form,
    coefficient_pair,
    coefficient_primitive,
    default_amplitude,
    fradkin_from_axes,
    fradkin_tensor,
    hamilton_vector,
    interior_grid,
    kepler_eccentricity,
    phase_constant,
    runge_lenz_vector,
    system_residual,
    trace_vector,
)
from .potentials import Potential, PotentialKind, check_derivative, parse_potential
from .quadrature import (
    ApsidalResult,
    QuadratureConfig,
    SweepProfile,
    apsidal_angle,
    radial_period,
    sweep_angle,
    turning_arc_integral,
)
from .radial import (
    OrbitClass,
    OrbitParams,
    TurningPoints,
    classify_orbit,
    find_circular_radius,
    find_turning_points,
)

__version__ = "0.1.0"
