"""Command-line interface.

Subcommands: ``turning`` (turning points), ``apsidal`` (apsidal angle),
``simulate`` (trajectory CSV plus conservation report), ``fbrs``
(perihelion-vector trace CSV plus jump report), ``verify`` (built-in
invariant battery) and ``bertrand`` (apsidal-angle sweep over power-law
exponents).  Scalar reports are JSON, series are CSV, floats use their
shortest round-trip decimal form, and identical configurations produce
byte-identical outputs.

Exit codes: 0 success, 2 configuration error, 3 physics error (orbit not
bounded / forbidden / circular), 4 numerical failure.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

from .dynamics import integrate_orbit, write_trajectory_csv
from .errors import (
    CircularDegenerateError,
    InvalidOrbitError,
    InvalidPotentialError,
    NotBoundedError,
    OrbitError,
)
from .perihelion import Gauge, default_amplitude, trace_vector
from .potentials import Potential, parse_potential
from .quadrature import QuadratureConfig, apsidal_angle, radial_period
from .radial import OrbitClass, OrbitParams, classify_orbit, find_turning_points
from .verification import run_checks

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_NUMERICAL = 4


def _gamma_token(text: str):
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"invalid --gamma value {text!r} (float or 'auto')") from None


def _add_orbit_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--potential", required=True,
                     help="kepler | hooke:omega=<f> | powerlaw:p=<f> | log")
    sub.add_argument("--energy", type=float, required=True)
    sub.add_argument("--angmom", type=float, required=True)


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--periods", type=int, default=3)
    sub.add_argument("--step-tol", type=float, default=1e-10)
    sub.add_argument("--quad-tol", type=float, default=1e-10)
    sub.add_argument("--gamma", type=_gamma_token, default="auto")
    sub.add_argument("--phi-offset", type=float, default=math.pi / 2.0)
    sub.add_argument("--out", default=None)
    sub.add_argument("--format", choices=("json", "csv"), default="json")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perivec",
        description="Piecewise-conserved perihelion vectors for planar "
                    "central-force orbits.")
    subs = parser.add_subparsers(dest="command", required=True)

    turning = subs.add_parser("turning", help="locate the turning points")
    _add_orbit_flags(turning)
    _add_common_flags(turning)
    turning.set_defaults(handler=_cmd_turning)

    apsidal = subs.add_parser("apsidal", help="apsidal angle by quadrature")
    _add_orbit_flags(apsidal)
    _add_common_flags(apsidal)
    apsidal.set_defaults(handler=_cmd_apsidal)

    simulate = subs.add_parser("simulate", help="integrate and dump a trajectory")
    _add_orbit_flags(simulate)
    _add_common_flags(simulate)
    simulate.set_defaults(handler=_cmd_simulate)

    fbrs = subs.add_parser("fbrs", help="trace the perihelion vector and its jumps")
    _add_orbit_flags(fbrs)
    _add_common_flags(fbrs)
    fbrs.set_defaults(handler=_cmd_fbrs)

    verify = subs.add_parser("verify", help="run the built-in invariant checks")
    verify.set_defaults(handler=_cmd_verify)

    bertrand = subs.add_parser(
        "bertrand", help="apsidal-angle sweep over power-law exponents")
    bertrand.add_argument("--p-min", type=float, default=-1.5)
    bertrand.add_argument("--p-max", type=float, default=3.0)
    bertrand.add_argument("--steps", type=int, default=10)
    bertrand.add_argument("--ecc-levels", type=int, default=2)
    bertrand.add_argument("--angmom", type=float, default=1.0)
    bertrand.add_argument("--quad-tol", type=float, default=1e-10)
    bertrand.add_argument("--workers", type=int, default=1)
    bertrand.add_argument("--out", default=None)
    bertrand.set_defaults(handler=_cmd_bertrand)

    return parser


def _orbit_from(args) -> OrbitParams:
    potential = parse_potential(args.potential)
    return OrbitParams(potential, args.energy, args.angmom)


def _gauge_from(args, params: OrbitParams) -> Gauge:
    amplitude = default_amplitude(params) if args.gamma == "auto" else args.gamma
    return Gauge(amplitude=amplitude, phase=args.phi_offset)


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as stream:
            stream.write(text)


def _scalar_report(payload: dict, args) -> None:
    if args.format == "csv":
        header = ",".join(payload)
        row = ",".join(repr(v) if isinstance(v, float) else str(v)
                       for v in payload.values())
        _emit(f"{header}\n{row}\n", args.out)
    else:
        _emit(json.dumps(payload) + "\n", args.out)


def _cmd_turning(args) -> int:
    params = _orbit_from(args)
    cls = classify_orbit(params)
    if cls is not OrbitClass.BOUNDED:
        sys.stdout.write(json.dumps(
            {"error": "orbit is not bounded", "class": cls.value}) + "\n")
        return EXIT_PHYSICS
    tp = find_turning_points(params)
    _scalar_report({
        "r_min": tp.r_min,
        "r_max": tp.r_max,
        "class": cls.value,
        "dVL_rm": tp.dvl_at_rmin,
        "dVL_rM": tp.dvl_at_rmax,
    }, args)
    return EXIT_OK


def _cmd_apsidal(args) -> int:
    params = _orbit_from(args)
    result = apsidal_angle(params, QuadratureConfig(abs_tol=args.quad_tol))
    _scalar_report({
        "phi": result.phi,
        "err": result.err_estimate,
        "evals": result.evaluations,
    }, args)
    return EXIT_OK


def _conservation_payload(traj) -> dict:
    return {
        "potential": traj.params.potential.label,
        "energy": traj.params.energy,
        "angmom": traj.params.angular_momentum,
        "radial_period": traj.radial_period,
        "r_min": traj.turning_points.r_min,
        "r_max": traj.turning_points.r_max,
        "samples": len(traj.samples),
        "events": len(traj.events),
        "energy_drift": traj.conservation.energy_drift,
        "angmom_drift": traj.conservation.angmom_drift,
    }


def _cmd_simulate(args) -> int:
    params = _orbit_from(args)
    traj = integrate_orbit(params, args.periods, args.step_tol,
                           quad_config=QuadratureConfig(abs_tol=args.quad_tol))
    buffer = io.StringIO()
    write_trajectory_csv(traj, buffer)
    report = json.dumps(_conservation_payload(traj)) + "\n"
    if args.out is None:
        sys.stdout.write(buffer.getvalue())
        sys.stderr.write(report)
    else:
        _emit(buffer.getvalue(), args.out)
        sys.stdout.write(report)
    return EXIT_OK


def _cmd_fbrs(args) -> int:
    params = _orbit_from(args)
    quad = QuadratureConfig(abs_tol=args.quad_tol)
    traj = integrate_orbit(params, args.periods, args.step_tol, quad_config=quad)
    trace = trace_vector(traj, _gauge_from(args, params), quad)
    buffer = io.StringIO()
    buffer.write("t,k,Ax,Ay\n")
    for s in trace.samples:
        buffer.write(f"{s.t!r},{s.k},{s.value.real!r},{s.value.imag!r}\n")
    report = json.dumps({
        "jumps": [{
            "t": jump.t,
            "apsis": jump.kind.value,
            "rotation": jump.rotation,
            "modulus_before": abs(jump.before),
            "modulus_after": abs(jump.after),
        } for jump in trace.jumps],
        "phi_apsidal": trace.apsidal,
    }) + "\n"
    if args.out is None:
        sys.stdout.write(buffer.getvalue())
        sys.stderr.write(report)
    else:
        _emit(buffer.getvalue(), args.out)
        sys.stdout.write(report)
    return EXIT_OK


def _cmd_verify(args) -> int:
    checks = run_checks()
    passed = all(check["passed"] for check in checks)
    sys.stdout.write(json.dumps({"checks": checks, "passed": passed},
                                indent=2) + "\n")
    return EXIT_OK if passed else EXIT_NUMERICAL


def _bertrand_cell(cell: tuple[float, float, float, float]) -> tuple:
    """One (exponent, energy-level) cell of the sweep; errors stay in-row."""
    p, L, fraction, quad_tol = cell
    potential = Potential.logarithmic() if p == 0.0 else Potential.power_law(p)
    probe = OrbitParams(potential, 0.0, L)
    from .radial import find_circular_radius  # local import for worker pickling

    r_c = find_circular_radius(probe)
    v_c = float(probe.effective_potential(r_c))
    if math.isfinite(potential.escape_energy):
        energy = v_c + 0.9 * fraction * (potential.escape_energy - v_c)
    else:
        energy = v_c + fraction * max(1.0, abs(v_c))
    params = OrbitParams(potential, energy, L)
    try:
        tp = find_turning_points(params)
        phi = apsidal_angle(params, QuadratureConfig(abs_tol=quad_tol), tp=tp).phi
        ecc = tp.width / (tp.r_max + tp.r_min)
        return (p, energy, L, ecc, phi, "ok")
    except OrbitError as exc:
        return (p, energy, L, math.nan, math.nan, type(exc).__name__)


def _cmd_bertrand(args) -> int:
    if args.steps < 2:
        raise InvalidOrbitError("--steps must be at least 2")
    if args.ecc_levels < 1:
        raise InvalidOrbitError("--ecc-levels must be at least 1")
    span = args.p_max - args.p_min
    exponents = [args.p_min + span * i / (args.steps - 1)
                 for i in range(args.steps)]
    fractions = [(j + 1.0) / (args.ecc_levels + 1.0)
                 for j in range(args.ecc_levels)]
    cells = [(p, args.angmom, fraction, args.quad_tol)
             for p in exponents if p > -2.0 for fraction in fractions]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_bertrand_cell, cells))
    else:
        rows = [_bertrand_cell(cell) for cell in cells]
    lines = ["p,E,L,ecc,phi,status"]
    for p, energy, L, ecc, phi, status in rows:
        lines.append(f"{p!r},{energy!r},{L!r},{ecc!r},{phi!r},{status}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        return args.handler(args)
    except (InvalidPotentialError, InvalidOrbitError) as exc:
        sys.stderr.write(json.dumps({"error": str(exc)}) + "\n")
        return EXIT_CONFIG
    except (NotBoundedError, CircularDegenerateError) as exc:
        sys.stderr.write(json.dumps({"error": str(exc)}) + "\n")
        return EXIT_PHYSICS
    except OrbitError as exc:
        sys.stderr.write(json.dumps({"error": str(exc)}) + "\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
