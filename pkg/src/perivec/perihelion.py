"""The piecewise-conserved FBRS perihelion vector for central potentials.

Writing the conserved-vector ansatz as

    A = (r^2 a(r) / L^2) * i L zdot + b(r) z,

the requirement dA/dt = 0 along each radial arc fixes the coefficient
functions up to two integration constants.  In terms of the sweep angle
g(r) measured from the inner turning point the closed-form solution is

    a(r) = amplitude * cos(g(r) + phase) / (r sqrt(f(r))),
    b(r) = a(r) + amplitude * sin(g(r) + phase) / r,

equivalently a = u', b = u' + u/r with the primitive
u(r) = amplitude * sin(g(r) + phase).  On the k-th radial arc A is the
constant

    A_k = (-1)^(k+1) * i * amplitude * exp(i ((-1)^k phase + 2 n Phi)),

n = floor(k/2), Phi the apsidal angle.  Consecutive arc constants agree
at the apsis where cos(g + phase) vanishes and differ by a rotation of
2*Phi at the other apsis, so the vector is conserved only piecewise
unless exp(2 i Phi) = 1 (the Kepler case, where it reduces to the
Laplace-Runge-Lenz vector).  With the default gauge phase = pi/2 the
continuous apsis is the inner turning point, hence the jumps sit at the
outer one; choosing phase = pi/2 - Phi moves them to the inner one.  The
starting apsis of the trajectory does not move the jumps; only the gauge
does.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ApsisKind, Trajectory
from .errors import (
    ApsidalSingularityError,
    InvalidPhaseError,
    NotHookeError,
)
from .potentials import Potential, PotentialKind
from .quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    SweepProfile,
    sweep_angle,
)
from .radial import OrbitParams, TurningPoints

__all__ = [
    "Gauge",
    "VectorSample",
    "JumpEvent",
    "VectorTrace",
    "default_amplitude",
    "kepler_eccentricity",
    "coefficient_primitive",
    "coefficient_pair",
    "assemble_vector",
    "assemble_vector_phase_form",
    "phase_constant",
    "system_residual",
    "interior_grid",
    "trace_vector",
    "runge_lenz_vector",
    "hamilton_vector",
    "fradkin_tensor",
    "fradkin_from_axes",
]

APSIS_EXCLUSION_FRACTION = 1e-3
JUMP_THRESHOLD_FRACTION = 1e-3


@dataclass(frozen=True)
class Gauge:
    """Integration constants of the coefficient solution.

    ``amplitude`` sets the modulus of the vector, ``phase`` (reduced into
    [0, 2pi)) its argument convention.  The equivalent linear-combination
    coefficients of the primitive u = alpha cos(g) + beta sin(g) are
    exposed as ``cos_amplitude`` (alpha) and ``sin_amplitude`` (beta).
    """

    amplitude: float
    phase: float = math.pi / 2.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "phase", self.phase % (2.0 * math.pi))

    @property
    def cos_amplitude(self) -> float:
        return self.amplitude * math.sin(self.phase)

    @property
    def sin_amplitude(self) -> float:
        return self.amplitude * math.cos(self.phase)


@dataclass(frozen=True)
class VectorSample:
    t: float
    value: complex
    k: int


@dataclass(frozen=True)
class JumpEvent:
    t: float
    kind: ApsisKind
    rotation: float
    before: complex
    after: complex


@dataclass(frozen=True)
class VectorTrace:
    samples: tuple[VectorSample, ...]
    jumps: tuple[JumpEvent, ...]
    phase_constants: dict[int, complex]
    apsidal: float


def kepler_eccentricity(params: OrbitParams) -> float:
    """Eccentricity sqrt(1 + 2 E L^2) of a bounded Kepler orbit."""
    if params.potential.kind is not PotentialKind.KEPLER:
        raise ValueError("eccentricity formula applies to the Kepler potential only")
    e_sq = 1.0 + 2.0 * params.energy * params.angular_momentum ** 2
    return math.sqrt(max(e_sq, 0.0))


def default_amplitude(params: OrbitParams) -> float:
    """Amplitude making the Kepler trace match the Laplace-Runge-Lenz
    vector (minus the eccentricity); 1.0 for every other potential."""
    pot = params.potential
    if pot.kind is PotentialKind.KEPLER and params.energy < 0.0:
        return -kepler_eccentricity(params)
    return 1.0


def coefficient_primitive(sweep: float, gauge: Gauge) -> float:
    """u = amplitude * sin(sweep + phase); a = u' and b = u' + u/r."""
    return gauge.amplitude * math.sin(sweep + gauge.phase)


def coefficient_pair(
    params: OrbitParams,
    tp: TurningPoints,
    r: float,
    gauge: Gauge,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> tuple[float, float]:
    """Coefficients (a, b) at radius r strictly between the apsides.

    ``a`` diverges like 1/sqrt(f) at the apsides even though the
    assembled vector stays finite there; evaluation with f(r) < 1e-12
    raises ApsidalSingularityError (use :func:`phase_constant` for the
    excluded zone).
    """
    f_val = float(params.radial_function(r))
    if f_val < 1e-12:
        raise ApsidalSingularityError(
            f"f(r) = {f_val!r} at r = {r!r}; coefficients diverge at apsides")
    sweep = sweep_angle(params, tp, r, config)
    return _pair_from_sweep(sweep, f_val, r, gauge)


def _pair_from_sweep(sweep: float, f_val: float, r: float,
                     gauge: Gauge) -> tuple[float, float]:
    a = gauge.amplitude * math.cos(sweep + gauge.phase) / (r * math.sqrt(f_val))
    b = a + gauge.amplitude * math.sin(sweep + gauge.phase) / r
    return a, b


def assemble_vector(z: complex, zdot: complex, r: float,
                    a: float, b: float, L: float) -> complex:
    """A = (r^2 a / L^2) * i L zdot + b z from one phase-space state."""
    return (r * r * a / (L * L)) * (1j * L * zdot) + b * z


def assemble_vector_phase_form(z: complex, k: int, f_val: float,
                               a: float, b: float) -> complex:
    """Equivalent per-arc form A_k = (b - a + (-1)^(k+1) i sqrt(f) a) z."""
    if k < 1:
        raise InvalidPhaseError(f"phase index must be >= 1, got {k!r}")
    sign = 1.0 if k % 2 == 1 else -1.0
    return complex(b - a, sign * math.sqrt(max(f_val, 0.0)) * a) * z


def phase_constant(k: int, gauge: Gauge, apsidal: float) -> complex:
    """Closed-form constant of the vector on the k-th radial arc."""
    if k < 1:
        raise InvalidPhaseError(f"phase index must be >= 1, got {k!r}")
    n = k // 2
    sign = 1.0 if k % 2 == 1 else -1.0
    angle = -sign * gauge.phase + 2.0 * n * apsidal
    return sign * 1j * gauge.amplitude * complex(math.cos(angle), math.sin(angle))


def interior_grid(tp: TurningPoints, n: int = 50,
                  margin: float = 0.02) -> np.ndarray:
    """n radii uniformly spaced on [r_min + m*width, r_max - m*width]."""
    pad = margin * tp.width
    return np.linspace(tp.r_min + pad, tp.r_max - pad, n)


def system_residual(
    params: OrbitParams,
    tp: TurningPoints,
    gauge: Gauge,
    grid,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Max residual of the coefficient equations over a radius grid.

    At each grid radius the derivatives a', b', u', u'' are formed by
    5-point central differences of the closed-form coefficients and
    substituted into

        a' - b' + (2a - b)/r = 0,
        r f a' + a (r f'/2 + f - 1) + b = 0,

    together with the chain identities a = u', b = u' + u/r and the
    second-order equation u'' + (1/r + f'/(2f)) u' + u/(r^2 f) = 0.
    Every residual is normalized by max(|a|, |b|, 1).  Grid radii must
    stay at least ~1e-2 * width away from the apsides; the stencil step
    shrinks near them to keep the differences inside the valid band.
    """
    tight = QuadratureConfig(abs_tol=min(config.abs_tol, 1e-12),
                             max_levels=config.max_levels)
    weights_1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
    weights_2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
    worst = 0.0
    for r in np.asarray(grid, dtype=float):
        dist = min(r - tp.r_min, tp.r_max - r)
        h = min(2e-3 * tp.width, 0.05 * dist)
        offsets = r + h * np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
        a_s = np.empty(5)
        b_s = np.empty(5)
        u_s = np.empty(5)
        for i, ri in enumerate(offsets):
            sweep = sweep_angle(params, tp, ri, tight)
            f_i = float(params.radial_function(ri))
            a_s[i], b_s[i] = _pair_from_sweep(sweep, f_i, ri, gauge)
            u_s[i] = coefficient_primitive(sweep, gauge)
        da = float(weights_1 @ a_s) / h
        db = float(weights_1 @ b_s) / h
        du = float(weights_1 @ u_s) / h
        ddu = float(weights_2 @ u_s) / (h * h)
        a, b, u = a_s[2], b_s[2], u_s[2]
        f_val = float(params.radial_function(r))
        df_val = float(params.radial_function_derivative(r))
        residuals = (
            da - db + (2.0 * a - b) / r,
            r * f_val * da + a * (0.5 * r * df_val + f_val - 1.0) + b,
            du - a,
            b - (du + u / r),
            ddu + (1.0 / r + 0.5 * df_val / f_val) * du + u / (r * r * f_val),
        )
        norm = max(abs(a), abs(b), 1.0)
        worst = max(worst, max(abs(res) for res in residuals) / norm)
    return worst


def trace_vector(
    traj: Trajectory,
    gauge: Gauge,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> VectorTrace:
    """Evaluate the vector along a trajectory and detect its jumps.

    Samples closer than 1e-3 * width to either apsis are skipped (the
    coefficient ``a`` degrades there); each remaining sample gets the
    assembled vector, each radial arc the componentwise median of its
    samples, and each arc transition whose constants differ by more than
    1e-3 in relative modulus a JumpEvent carrying the rotation angle.
    """
    params = traj.params
    tp = traj.turning_points
    profile = SweepProfile(params, tp, config)
    L = params.angular_momentum
    margin = APSIS_EXCLUSION_FRACTION * tp.width

    samples: list[VectorSample] = []
    by_phase: dict[int, list[complex]] = {}
    for s in traj.samples:
        if (s.r - tp.r_min) < margin or (tp.r_max - s.r) < margin:
            continue
        sweep = profile.angle(s.r)
        f_val = float(params.radial_function(s.r))
        a, b = _pair_from_sweep(sweep, f_val, s.r, gauge)
        value = assemble_vector(s.z, s.zdot, s.r, a, b, L)
        samples.append(VectorSample(t=s.t, value=value, k=s.k))
        by_phase.setdefault(s.k, []).append(value)

    constants: dict[int, complex] = {}
    for k, values in by_phase.items():
        if len(values) < 8:
            continue
        arr = np.asarray(values)
        constants[k] = complex(np.median(arr.real), np.median(arr.imag))

    jumps: list[JumpEvent] = []
    for event in traj.events:
        before = constants.get(event.k_before)
        after = constants.get(event.k_after)
        if before is None or after is None:
            continue
        if abs(after - before) <= JUMP_THRESHOLD_FRACTION * abs(before):
            continue
        jumps.append(JumpEvent(
            t=event.t,
            kind=event.kind,
            rotation=float(np.angle(after / before)),
            before=before,
            after=after,
        ))
    return VectorTrace(samples=tuple(samples), jumps=tuple(jumps),
                       phase_constants=constants, apsidal=profile.apsidal)


def runge_lenz_vector(z: complex, zdot: complex, L: float) -> complex:
    """Laplace-Runge-Lenz vector of the Kepler problem, i L zdot + z/r.

    The orientation is fixed so the value is conserved along Kepler
    orbits and coincides with the assembled vector at coefficients
    a = L^2/r^2, b = 1/r; its modulus is the eccentricity.
    """
    return 1j * L * zdot + z / abs(z)


def hamilton_vector(L: float, vector: complex) -> complex:
    """Orthogonal companion i L A (the cross product of L with A)."""
    return 1j * L * vector


def fradkin_tensor(potential: Potential, z: complex, zdot: complex) -> np.ndarray:
    """Conserved rank-2 tensor of the isotropic oscillator.

    T = (1/2) v (x) v + (omega^2/2) x (x) x as a symmetric 2x2 matrix;
    its trace equals the orbit energy.
    """
    if potential.kind is not PotentialKind.HOOKE:
        raise NotHookeError(
            f"Fradkin tensor requires the hooke potential, got {potential.label}")
    pos = np.array([z.real, z.imag])
    vel = np.array([zdot.real, zdot.imag])
    w2 = potential.omega * potential.omega
    return 0.5 * np.outer(vel, vel) + 0.5 * w2 * np.outer(pos, pos)


def fradkin_from_axes(direction: complex, semi_axis: float, L: float,
                      omega: float) -> np.ndarray:
    """Rebuild the oscillator tensor from one apsidal direction.

    ``direction`` fixes an orbit axis (any nonzero modulus, e.g. a traced
    vector constant); ``semi_axis`` must be the orbit semi-axis along that
    direction.  With A the apsidal vector (modulus = semi_axis) and
    S = i L A, the eigendecomposition of the tensor is

        T = (omega^2 / 2) A (x) A + S (x) S / (2 |A|^4),

    where the |A|^4 normalization makes the second term independent of
    the modulus of S = L x A and equal to L^2/(2 |A|^2) along the other
    axis, as required by L = omega * (product of the semi-axes).
    """
    mod = abs(direction)
    if mod == 0.0:
        raise ValueError("direction must be a nonzero complex number")
    axis = direction / mod * semi_axis
    a_vec = np.array([axis.real, axis.imag])
    s = hamilton_vector(L, axis)
    s_vec = np.array([s.real, s.imag])
    return (0.5 * omega * omega * np.outer(a_vec, a_vec)
            + np.outer(s_vec, s_vec) / (2.0 * semi_axis ** 4))
