"""Self-contained invariant checks behind the ``verify`` CLI subcommand.

Each check returns (passed, detail) and exercises one analytic identity
of the library at desk scale: apsidal angles of the two special
potentials, turning-point locations, conservation drift, branch
reconstruction of the polar angle, piecewise constancy and the jump law
of the perihelion vector, and the coefficient-system residual.
"""
from __future__ import annotations

import math

import numpy as np

from .dynamics import branch_angle, integrate_orbit
from .perihelion import (
    Gauge,
    default_amplitude,
    interior_grid,
    runge_lenz_vector,
    system_residual,
    trace_vector,
)
from .potentials import Potential
from .quadrature import QuadratureConfig, SweepProfile, apsidal_angle
from .radial import OrbitParams, find_turning_points

_QUAD = QuadratureConfig(abs_tol=1e-11)
_FAMILIES = {
    "kepler": OrbitParams(Potential.kepler(), -0.375, 1.0),
    "hooke": OrbitParams(Potential.hooke(1.0), 1.25, 1.0),
    "log": OrbitParams(Potential.logarithmic(), 1.0, 1.0),
    "powerlaw3": OrbitParams(Potential.power_law(3.0), 1.2, 1.0),
}


def _check_kepler_apsidal():
    worst = 0.0
    for e in (0.3, 0.7):
        for L in (0.5, 2.0):
            params = OrbitParams(Potential.kepler(), -(1.0 - e * e) / (2.0 * L * L), L)
            worst = max(worst, abs(apsidal_angle(params, _QUAD).phi - math.pi))
    return worst <= 1e-8, f"max |phi - pi| = {worst:.3e}"


def _check_hooke_apsidal():
    worst = 0.0
    for energy, L in ((1.25, 1.0), (3.0, 0.5)):
        params = OrbitParams(Potential.hooke(1.0), energy, L)
        worst = max(worst, abs(apsidal_angle(params, _QUAD).phi - math.pi / 2.0))
    return worst <= 1e-8, f"max |phi - pi/2| = {worst:.3e}"


def _check_turning_points():
    tp = find_turning_points(_FAMILIES["kepler"])
    err = max(abs(tp.r_min - 2.0 / 3.0), abs(tp.r_max - 2.0))
    signs_ok = tp.dvl_at_rmin < 0.0 < tp.dvl_at_rmax
    return err <= 1e-10 and signs_ok, f"max root error = {err:.3e}"


def _check_conservation():
    worst = 0.0
    for params in _FAMILIES.values():
        traj = integrate_orbit(params, 2, 1e-12)
        worst = max(worst, traj.conservation.energy_drift,
                    traj.conservation.angmom_drift)
    return worst <= 1e-9, f"max relative drift = {worst:.3e}"


def _log_trajectory():
    return integrate_orbit(_FAMILIES["log"], 2, 1e-12)


def _check_branch_angles(traj):
    profile = SweepProfile(traj.params, traj.turning_points, _QUAD)
    worst = 0.0
    for s in traj.samples:
        predicted = branch_angle(profile.angle(s.r), s.k, profile.apsidal)
        worst = max(worst, abs(s.theta - predicted))
    return worst <= 1e-6, f"max |theta - theta_k| = {worst:.3e}"


def _check_vector_trace(traj):
    trace = trace_vector(traj, Gauge(1.0), _QUAD)
    spread = 0.0
    for s in trace.samples:
        const = trace.phase_constants.get(s.k)
        if const is not None:
            spread = max(spread, abs(s.value - const))
    if len(trace.jumps) != 2:
        return False, f"expected 2 jumps, found {len(trace.jumps)}"
    worst_rot = 0.0
    worst_mod = 0.0
    target = 2.0 * trace.apsidal
    for jump in trace.jumps:
        delta = (jump.rotation - target + math.pi) % (2.0 * math.pi) - math.pi
        worst_rot = max(worst_rot, abs(delta))
        worst_mod = max(worst_mod, abs(abs(jump.after) - abs(jump.before)))
    ok = spread <= 1e-6 and worst_rot <= 1e-5 and worst_mod <= 1e-8
    return ok, (f"spread = {spread:.3e}, max |rot - 2 phi| = {worst_rot:.3e}, "
                f"max modulus change = {worst_mod:.3e}")


def _check_kepler_vector():
    params = _FAMILIES["kepler"]
    traj = integrate_orbit(params, 2, 1e-12)
    gauge = Gauge(default_amplitude(params))
    trace = trace_vector(traj, gauge, _QUAD)
    if trace.jumps:
        return False, f"expected no jumps, found {len(trace.jumps)}"
    by_time = {s.t: s for s in traj.samples}
    worst = 0.0
    for vs in trace.samples:
        s = by_time[vs.t]
        worst = max(worst, abs(vs.value - runge_lenz_vector(
            s.z, s.zdot, params.angular_momentum)))
    return worst <= 1e-8, f"max |A - A_LRL| = {worst:.3e}"


def _check_coefficient_system():
    worst = 0.0
    for name in ("kepler", "log"):
        params = _FAMILIES[name]
        tp = find_turning_points(params)
        gauge = Gauge(default_amplitude(params))
        worst = max(worst, system_residual(params, tp, gauge,
                                           interior_grid(tp, 20), _QUAD))
    return worst <= 1e-6, f"max residual = {worst:.3e}"


def run_checks() -> list[dict]:
    """Run the whole battery; never raises, failures carry the message."""
    log_traj = None
    results: list[dict] = []

    def record(name, fn, *args):
        try:
            passed, detail = fn(*args)
        except Exception as exc:  # noqa: BLE001 - report, do not abort the battery
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append({"name": name, "passed": bool(passed), "detail": detail})

    record("kepler_apsidal", _check_kepler_apsidal)
    record("hooke_apsidal", _check_hooke_apsidal)
    record("turning_points", _check_turning_points)
    record("conservation", _check_conservation)
    try:
        log_traj = _log_trajectory()
    except Exception as exc:  # noqa: BLE001
        results.append({"name": "log_trajectory", "passed": False,
                        "detail": f"{type(exc).__name__}: {exc}"})
    if log_traj is not None:
        record("branch_angles", _check_branch_angles, log_traj)
        record("vector_trace", _check_vector_trace, log_traj)
    record("kepler_vector", _check_kepler_vector)
    record("coefficient_system", _check_coefficient_system)
    return results
