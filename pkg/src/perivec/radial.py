"""Effective-potential analysis: orbit classification and turning points.

For unit mass and angular momentum L > 0 the radial motion is governed by
the effective potential ``V_L(r) = U(r) + L^2 / (2 r^2)`` and by the
dimensionless factor

    f(r) = (2 r^2 / L^2) (E - V_L(r)),    rdot^2 = (L/r)^2 f(r),

which is positive strictly between the two turning points of a bounded
orbit and vanishes linearly at each of them when the roots are simple.
Simple roots require the effective-potential slope to be negative at the
inner turning point and positive at the outer one; orbits violating that
(within tolerance) are rejected as circular-degenerate because every
downstream quadrature and phase formula assumes simple roots.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (
    CircularDegenerateError,
    InvalidOrbitError,
    NoMinimumFoundError,
    NotBoundedError,
)
from .potentials import Potential

__all__ = [
    "OrbitParams",
    "OrbitClass",
    "TurningPoints",
    "find_circular_radius",
    "classify_orbit",
    "find_turning_points",
]


@dataclass(frozen=True)
class OrbitParams:
    """Conserved inputs of a planar central-force orbit (unit mass).

    A negative angular momentum is reduced to its absolute value and the
    reflection is recorded in ``reflected``; zero angular momentum is
    rejected because the polar-angle rate L / r^2 must not vanish.
    """

    potential: Potential
    energy: float
    angular_momentum: float
    reflected: bool = False

    def __post_init__(self) -> None:
        L = self.angular_momentum
        if not (math.isfinite(L) and L != 0.0):
            raise InvalidOrbitError(
                f"angular momentum must be finite and nonzero, got {L!r}")
        if L < 0.0:
            object.__setattr__(self, "angular_momentum", -L)
            object.__setattr__(self, "reflected", True)

    def effective_potential(self, r):
        """V_L(r) = U(r) + L^2 / (2 r^2)."""
        L = self.angular_momentum
        return self.potential.value(r) + 0.5 * L * L / (r * r)

    def effective_potential_derivative(self, r):
        """V_L'(r) = U'(r) - L^2 / r^3."""
        L = self.angular_momentum
        return self.potential.derivative(r) - L * L / (r * r * r)

    def radial_function(self, r):
        """f(r) = (2 r^2 / L^2)(E - U(r)) - 1; rdot^2 = (L/r)^2 f(r)."""
        L = self.angular_momentum
        return 2.0 * r * r / (L * L) * (self.energy - self.potential.value(r)) - 1.0

    def radial_function_derivative(self, r):
        """Closed-form f'(r)."""
        L = self.angular_momentum
        gap = self.energy - self.potential.value(r)
        return (4.0 * r * gap - 2.0 * r * r * self.potential.derivative(r)) / (L * L)


class OrbitClass(enum.Enum):
    BOUNDED = "bounded"
    CIRCULAR = "circular"
    UNBOUNDED = "unbounded"
    FORBIDDEN = "forbidden"


@dataclass(frozen=True)
class TurningPoints:
    """Simple roots r_min < r_max of f(r) = 0 with slope certificates.

    ``dvl_at_rmin`` / ``dvl_at_rmax`` hold V_L' at the roots; their signs
    (negative inner, positive outer) certify that both roots are simple.
    """

    r_min: float
    r_max: float
    dvl_at_rmin: float
    dvl_at_rmax: float

    @property
    def width(self) -> float:
        return self.r_max - self.r_min


def find_circular_radius(params: OrbitParams, *, samples_per_decade: int = 20) -> float:
    """Radius of the interior minimum of V_L, to 1e-12 relative tolerance.

    Brackets a sign change of V_L' on a log-spaced grid ([1e-3, 1e3] first,
    expanded to [1e-6, 1e6] if needed) and refines it with a bracketed
    root solver.  Raises NoMinimumFoundError if no bracket exists even on
    the expanded grid.
    """
    dvl = params.effective_potential_derivative
    for lo, hi in ((1e-3, 1e3), (1e-6, 1e6)):
        n = samples_per_decade * int(round(math.log10(hi / lo))) + 1
        grid = np.geomspace(lo, hi, n)
        values = np.asarray(dvl(grid))
        exact = np.nonzero(values == 0.0)[0]
        if exact.size:
            return float(grid[exact[0]])
        brackets = np.nonzero((values[:-1] < 0.0) & (values[1:] > 0.0))[0]
        if brackets.size:
            i = int(brackets[0])
            return float(brentq(dvl, grid[i], grid[i + 1],
                                rtol=1e-12, xtol=1e-15 * grid[i]))
    raise NoMinimumFoundError(
        f"no effective-potential minimum found in [1e-6, 1e6] for {params.potential.label}")


def classify_orbit(params: OrbitParams, *, circular_tol: float = 1e-12) -> OrbitClass:
    """Classify by comparing E against min V_L and the escape energy."""
    r_c = find_circular_radius(params)
    v_min = float(params.effective_potential(r_c))
    tol = circular_tol * max(1.0, abs(v_min))
    if params.energy < v_min - tol:
        return OrbitClass.FORBIDDEN
    if params.energy <= v_min + tol:
        return OrbitClass.CIRCULAR
    if params.energy >= params.potential.escape_energy:
        return OrbitClass.UNBOUNDED
    return OrbitClass.BOUNDED


def _bracket_inward(f, r_c: float) -> float:
    r = r_c
    for _ in range(600):
        r *= 0.5
        if f(r) < 0.0:
            return r
    raise NotBoundedError("no inner sign change of f(r) found below the circular radius")


def _bracket_outward(f, r_c: float) -> float:
    r = r_c
    for _ in range(600):
        r *= 2.0
        if f(r) < 0.0:
            return r
    raise NotBoundedError("no outer sign change of f(r) found above the circular radius")


def find_turning_points(
    params: OrbitParams,
    *,
    rel_tol: float = 1e-13,
    slope_tol: float = 1e-10,
    width_tol: float = 1e-9,
) -> TurningPoints:
    """Locate the inner and outer turning points of a bounded orbit.

    The search is split at the circular radius so each root of f is
    isolated before bracketed refinement (f has exactly two sign changes
    for a bounded orbit with simple roots).  Raises NotBoundedError when
    the orbit class is not bounded, and CircularDegenerateError when the
    roots are too close (width < ``width_tol`` * r_c) or an
    effective-potential slope at a root is smaller than ``slope_tol``.
    """
    cls = classify_orbit(params)
    if cls is OrbitClass.CIRCULAR:
        raise CircularDegenerateError("energy sits at the effective-potential minimum")
    if cls is not OrbitClass.BOUNDED:
        raise NotBoundedError(f"orbit class is {cls.value!r}, expected bounded")

    r_c = find_circular_radius(params)
    f = params.radial_function
    if not f(r_c) > 0.0:
        raise CircularDegenerateError("f(r_c) is not positive; roots are degenerate")

    rtol = max(rel_tol, 4.0 * np.finfo(float).eps)
    lo = _bracket_inward(f, r_c)
    r_min = float(brentq(f, lo, r_c, rtol=rtol, xtol=1e-15 * r_c))
    hi = _bracket_outward(f, r_c)
    r_max = float(brentq(f, r_c, hi, rtol=rtol, xtol=1e-15 * r_c))

    if r_max - r_min < width_tol * r_c:
        raise CircularDegenerateError(
            f"turning points nearly coincide: r_max - r_min = {r_max - r_min:.3e}")
    dvl_min = float(params.effective_potential_derivative(r_min))
    dvl_max = float(params.effective_potential_derivative(r_max))
    if dvl_min > -slope_tol or dvl_max < slope_tol:
        raise CircularDegenerateError(
            "turning point is not a simple root: "
            f"V_L'(r_min)={dvl_min:.3e}, V_L'(r_max)={dvl_max:.3e}")
    return TurningPoints(r_min=r_min, r_max=r_max,
                         dvl_at_rmin=dvl_min, dvl_at_rmax=dvl_max)
