"""Time integration of planar central-force motion in complex coordinates.

The equation of motion ``zddot + (z/r) U'(r) = 0`` is integrated as a
first-order real system (x, y, vx, vy, theta) with an adaptive embedded
Dormand-Prince 5(4) pair.  The polar angle is carried as a fifth state
component with ``thetadot = Im(conj(z) zdot) / r^2`` so it stays
continuous (never reduced mod 2pi) and consistent with the integrated
positions to local tolerance.

Each radial extremum (``rdot = 0``, equivalently ``Re(conj(z) zdot) = 0``)
is an apsis event: detected by a sign change across an accepted step,
refined by bisection on the cubic-Hermite dense output, and used to
increment the phase index k.  With the default start at the inner
turning point, odd k labels radially increasing arcs and even k
decreasing ones, so the sign of rdot in phase k is (-1)^(k+1).
"""
from __future__ import annotations

import enum
import io
import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import (
    AmbiguousApsisError,
    InvalidPhaseError,
    OutsideRadialRangeError,
    StepFailureError,
)
from .quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    radial_period,
    sweep_angle,
)
from .radial import OrbitParams, TurningPoints, find_turning_points

__all__ = [
    "ApsisKind",
    "ApsisEvent",
    "TrajectorySample",
    "ConservationRecord",
    "Trajectory",
    "DenseSegment",
    "integrate_orbit",
    "detect_apsides",
    "branch_angle",
    "velocity_at_radius",
    "write_trajectory_csv",
]

THETA_SAMPLES_PER_TURN = 200


class ApsisKind(enum.Enum):
    PERICENTER = "pericenter"
    APOCENTER = "apocenter"


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    z: complex
    zdot: complex
    r: float
    theta: float
    k: int


@dataclass(frozen=True)
class ApsisEvent:
    t: float
    kind: ApsisKind
    r_at_event: float
    k_before: int
    k_after: int


@dataclass(frozen=True)
class ConservationRecord:
    """Max relative drift of E = |zdot|^2/2 + U(r) and L = Im(conj(z) zdot)."""

    energy_drift: float
    angmom_drift: float


@dataclass(frozen=True)
class Trajectory:
    params: OrbitParams
    turning_points: TurningPoints
    radial_period: float
    samples: tuple[TrajectorySample, ...]
    events: tuple[ApsisEvent, ...]
    conservation: ConservationRecord


@dataclass(frozen=True)
class DenseSegment:
    """One accepted integrator step with quartic dense output.

    ``interp`` holds the stage combinations K^T P of the embedded pair's
    quartic interpolant, which matches the states and slopes at both step
    ends and keeps the interpolation error at the same order as the
    accepted-step error.
    """

    t0: float
    t1: float
    y0: np.ndarray
    y1: np.ndarray
    interp: np.ndarray

    def state(self, t: float) -> np.ndarray:
        h = self.t1 - self.t0
        x = (t - self.t0) / h
        powers = np.array([x, x * x, x ** 3, x ** 4])
        return self.y0 + h * (self.interp @ powers)


# Dormand-Prince 5(4) tableau; the 6th stage row doubles as the 5th-order
# propagation weights and the last stage is first-same-as-last.
_DP_C = (0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0)
_DP_A = (
    (0.2,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
)
_DP_ERR = np.array([71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
                    -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0])
# Quartic dense-output coefficients of the 5(4) pair (Shampine's
# interpolant): y(t0 + x h) = y0 + h (K^T P) [x, x^2, x^3, x^4].
_DP_P = np.array([
    [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0],
    [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0],
    [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0],
    [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0,
     -1453857185.0 / 822651844.0],
    [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0,
     69997945.0 / 29380423.0],
])


def _dp_step(rhs, t, y, f_start, h):
    """One embedded 5(4) attempt.

    Returns (y_new, f_new, scaled_error_vec, interp) where ``interp`` are
    the dense-output stage combinations K^T P.
    """
    k = [f_start]
    for c, row in zip(_DP_C[:-1], _DP_A[:-1]):
        acc = row[0] * k[0]
        for a, ki in zip(row[1:], k[1:]):
            acc = acc + a * ki
        k.append(rhs(t + c * h, y + h * acc))
    y_new = y + h * (
        _DP_A[5][0] * k[0] + _DP_A[5][2] * k[2] + _DP_A[5][3] * k[3]
        + _DP_A[5][4] * k[4] + _DP_A[5][5] * k[5])
    f_new = rhs(t + h, y_new)  # first-same-as-last: doubles as the 7th stage
    k.append(f_new)
    stages = np.stack(k)
    err = h * (_DP_ERR @ stages)
    return y_new, f_new, err, stages.T @ _DP_P


def _radial_momentum(y: np.ndarray) -> float:
    """r * rdot = Re(conj(z) zdot); vanishes exactly at apsides."""
    return y[0] * y[2] + y[1] * y[3]


def detect_apsides(
    segments: list[DenseSegment],
    tp: TurningPoints,
    period: float,
    t_limit: float | None = None,
) -> list[ApsisEvent]:
    """Locate apsis events on the dense output of an integration.

    Each sign change of r*rdot across a segment is refined by bisection
    to a time tolerance of 1e-10 * period.  The event kind is assigned by
    radius proximity to the turning points; a refined radius farther than
    1e-3 * (r_max - r_min) from both raises AmbiguousApsisError.
    """
    events: list[ApsisEvent] = []
    k = 1
    time_tol = 1e-10 * period
    radius_tol = 1e-3 * tp.width
    for seg in segments:
        w0 = _radial_momentum(seg.y0)
        w1 = _radial_momentum(seg.y1)
        if w0 == 0.0 or w0 * w1 > 0.0:
            continue
        lo, hi = seg.t0, seg.t1
        w_lo = w0
        while hi - lo > time_tol:
            mid = 0.5 * (lo + hi)
            w_mid = _radial_momentum(seg.state(mid))
            if w_lo * w_mid <= 0.0:
                hi = mid
            else:
                lo, w_lo = mid, w_mid
        t_star = 0.5 * (lo + hi)
        state = seg.state(t_star)
        r_star = math.hypot(state[0], state[1])
        d_min = abs(r_star - tp.r_min)
        d_max = abs(r_star - tp.r_max)
        if min(d_min, d_max) > radius_tol:
            raise AmbiguousApsisError(
                f"radial extremum at r={r_star!r} is near neither turning point")
        if t_limit is not None and t_star > t_limit:
            break
        kind = ApsisKind.PERICENTER if d_min < d_max else ApsisKind.APOCENTER
        events.append(ApsisEvent(t=t_star, kind=kind, r_at_event=r_star,
                                 k_before=k, k_after=k + 1))
        k += 1
    return events


def _theta_crossing_time(seg: DenseSegment, target: float) -> float:
    """Time at which the (monotone) theta component reaches ``target``."""
    lo, hi = seg.t0, seg.t1
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if seg.state(mid)[4] < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def integrate_orbit(
    params: OrbitParams,
    n_periods: int,
    step_tol: float = 1e-10,
    *,
    start_at_apocenter: bool = False,
    quad_config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> Trajectory:
    """Integrate ``n_periods`` radial periods of a bounded orbit.

    Starts at the inner turning point with purely tangential velocity
    (z = r_min, zdot = i L / r_min, theta = 0, k = 1), or at the outer
    one if ``start_at_apocenter`` is set.  Samples are emitted at every
    accepted step and, in addition, whenever theta crosses a multiple of
    2pi / 200, which keeps the density at or above 200 samples per radial
    period (the maximum step is also capped at period / 256).

    ``step_tol`` is used as both the absolute and relative local error
    tolerance of the embedded pair.
    """
    if n_periods < 1:
        raise ValueError(f"n_periods must be >= 1, got {n_periods!r}")
    if not step_tol > 0.0:
        raise ValueError(f"step_tol must be positive, got {step_tol!r}")

    tp = find_turning_points(params)
    period = radial_period(params, quad_config, tp=tp)
    pot = params.potential
    L = params.angular_momentum

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        x, yy, vx, vy, _ = y
        r2 = x * x + yy * yy
        r = math.sqrt(r2)
        pull = pot.derivative(r) / r
        return np.array([vx, vy, -pull * x, -pull * yy, (x * vy - yy * vx) / r2])

    r0 = tp.r_max if start_at_apocenter else tp.r_min
    y = np.array([r0, 0.0, 0.0, L / r0, 0.0])
    t = 0.0
    f = rhs(t, y)

    t_end = n_periods * period
    # A short overshoot keeps the apsis at t_end strictly interior to the
    # integrated span so its sign change cannot be lost to roundoff.
    t_pad = t_end + 1e-3 * period
    max_h = period / 256.0
    min_h = 1e-14 * period
    h = period / 1024.0

    theta_step = 2.0 * math.pi / THETA_SAMPLES_PER_TURN
    segments: list[DenseSegment] = []
    raw: list[tuple[float, np.ndarray]] = [(t, y.copy())]

    while t < t_pad:
        h = min(h, max_h, t_pad - t)
        while True:
            y_new, f_new, err, interp = _dp_step(rhs, t, y, f, h)
            scale = step_tol + step_tol * np.maximum(np.abs(y), np.abs(y_new))
            norm = math.sqrt(float(np.mean((err / scale) ** 2)))
            if math.isfinite(norm) and norm <= 1.0:
                break
            shrink = 0.2 if not math.isfinite(norm) else max(
                0.2, 0.9 * norm ** -0.2)
            h *= shrink
            if h < min_h:
                raise StepFailureError(
                    f"step size underflowed at t={t!r} (h={h!r})")
        seg = DenseSegment(t0=t, t1=t + h, y0=y, y1=y_new, interp=interp)
        segments.append(seg)

        # theta-grid samples interior to this step
        theta0, theta1 = y[4], y_new[4]
        m = math.floor(theta0 / theta_step) + 1
        target = m * theta_step
        while target <= theta1:
            ts = _theta_crossing_time(seg, target)
            if ts <= t_end and ts < seg.t1:
                raw.append((ts, seg.state(ts)))
            target += theta_step
        # step endpoint (or the exact trajectory end when crossing it)
        if seg.t1 <= t_end:
            raw.append((seg.t1, y_new.copy()))
        elif seg.t0 < t_end:
            raw.append((t_end, seg.state(t_end)))

        t += h
        y, f = y_new, f_new
        if norm > 0.0:
            h *= min(5.0, max(0.2, 0.9 * norm ** -0.2))

    events = detect_apsides(segments, tp, period, t_limit=t_end + 1e-9 * period)
    event_times = [ev.t for ev in events]

    raw.sort(key=lambda item: item[0])
    samples: list[TrajectorySample] = []
    last_t = -math.inf
    for ts, state in raw:
        if ts - last_t < 1e-12 * period and samples:
            samples.pop()  # keep the later, more accurate duplicate
        k = 1 + bisect_right(event_times, ts)
        samples.append(TrajectorySample(
            t=ts,
            z=complex(state[0], state[1]),
            zdot=complex(state[2], state[3]),
            r=math.hypot(state[0], state[1]),
            theta=float(state[4]),
            k=k,
        ))
        last_t = ts

    arr = np.array([[s.z.real, s.z.imag, s.zdot.real, s.zdot.imag]
                    for s in samples])
    r_arr = np.hypot(arr[:, 0], arr[:, 1])
    energy = 0.5 * (arr[:, 2] ** 2 + arr[:, 3] ** 2) + pot.value(r_arr)
    angmom = arr[:, 0] * arr[:, 3] - arr[:, 1] * arr[:, 2]
    e_ref, l_ref = params.energy, params.angular_momentum
    e_den = abs(e_ref) if abs(e_ref) > 1e-12 else 1.0
    conservation = ConservationRecord(
        energy_drift=float(np.max(np.abs(energy - e_ref))) / e_den,
        angmom_drift=float(np.max(np.abs(angmom - l_ref))) / abs(l_ref),
    )
    return Trajectory(
        params=params,
        turning_points=tp,
        radial_period=period,
        samples=tuple(samples),
        events=tuple(events),
        conservation=conservation,
    )


def branch_angle(sweep: float, k: int, apsidal: float) -> float:
    """Polar angle on the k-th radial arc as a function of the sweep angle.

    theta_k = 2 n Phi + (-1)^(k+1) sweep with n = floor(k / 2): the branch
    structure that unwinds theta(r) across successive radial arcs.
    """
    if k < 1:
        raise InvalidPhaseError(f"phase index must be >= 1, got {k!r}")
    n = k // 2
    signed = sweep if k % 2 == 1 else -sweep
    return 2.0 * n * apsidal + signed


def velocity_at_radius(
    params: OrbitParams,
    tp: TurningPoints,
    r: float,
    k: int,
    apsidal: float,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> complex:
    """Closed-form velocity at radius r in phase k.

    zdot = (L/r) ((-1)^(k+1) sqrt(f) + i) exp(i theta_k(r)); useful as an
    independent cross-check of integrated velocities.
    """
    if k < 1:
        raise InvalidPhaseError(f"phase index must be >= 1, got {k!r}")
    slack = 1e-12 * max(tp.width, tp.r_max)
    if r < tp.r_min - slack or r > tp.r_max + slack:
        raise OutsideRadialRangeError(
            f"radius {r!r} outside [{tp.r_min!r}, {tp.r_max!r}]")
    sweep = sweep_angle(params, tp, min(max(r, tp.r_min), tp.r_max), config)
    theta = branch_angle(sweep, k, apsidal)
    root = math.sqrt(max(float(params.radial_function(r)), 0.0))
    sign = 1.0 if k % 2 == 1 else -1.0
    L = params.angular_momentum
    return (L / r) * complex(sign * root, 1.0) * complex(math.cos(theta),
                                                         math.sin(theta))


def write_trajectory_csv(traj: Trajectory, stream: io.TextIOBase) -> None:
    """One row per sample; floats in shortest round-trip form."""
    stream.write("t,x,y,vx,vy,r,theta,k\n")
    for s in traj.samples:
        stream.write(f"{s.t!r},{s.z.real!r},{s.z.imag!r},"
                     f"{s.zdot.real!r},{s.zdot.imag!r},"
                     f"{s.r!r},{s.theta!r},{s.k}\n")
