"""Singularity-aware quadrature for the sweep angle and radial period.

Between consecutive turning points the polar angle swept from the inner
turning point is

    sweep(r) = integral from r_min to r of d rho / (rho sqrt(f(rho))),

and its value at r_max is the apsidal angle.  The integrands carry
integrable 1/sqrt singularities where f vanishes; substituting
``rho = r_min + s^2`` (and the mirror form ``rho = r_max - s^2`` for the
upper half) turns each half into a smooth integral in s, which nested
Gauss-Legendre refinement then resolves to near machine precision.  The
reported error estimate is the difference between the last two
refinement levels: honest, but not a strict bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import OutsideRadialRangeError, ToleranceNotReachedError
from .radial import OrbitParams, TurningPoints, find_turning_points

__all__ = [
    "QuadratureConfig",
    "ApsidalResult",
    "DEFAULT_QUADRATURE",
    "turning_arc_integral",
    "sweep_angle",
    "apsidal_angle",
    "radial_period",
    "SweepProfile",
]


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    max_levels: int = 12

    def __post_init__(self) -> None:
        if not self.abs_tol > 0.0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol!r}")
        if self.max_levels < 2:
            raise ValueError(f"max_levels must be at least 2, got {self.max_levels!r}")


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class ApsidalResult:
    phi: float
    err_estimate: float
    evaluations: int


_gauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
# Single-panel Gauss-Legendre rules above this size are replaced by
# composite panels of this size (node generation is O(n^3)).
_MAX_GAUSS_NODES = 1024


def _gauss_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    rule = _gauss_cache.get(n)
    if rule is None:
        rule = np.polynomial.legendre.leggauss(n)
        _gauss_cache[n] = rule
    return rule


def _level_value(fn, a: float, b: float, level: int) -> tuple[float, int]:
    n = 16 << level
    if n <= _MAX_GAUSS_NODES:
        panels = 1
    else:
        panels, n = n // _MAX_GAUSS_NODES, _MAX_GAUSS_NODES
    nodes, weights = _gauss_rule(n)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    points = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    values = np.asarray(fn(points), dtype=float).reshape(panels, n)
    total = float(np.sum((values @ weights) * half))
    return total, points.size


def _refine_smooth(fn, a: float, b: float, abs_tol: float,
                   max_levels: int) -> tuple[float, float, int]:
    """Integrate a smooth integrand on [a, b] by doubling quadrature levels."""
    if b <= a:
        return 0.0, 0.0, 0
    evaluations = 0
    previous = None
    for level in range(max_levels):
        value, used = _level_value(fn, a, b, level)
        evaluations += used
        if previous is not None:
            err = abs(value - previous)
            if err <= abs_tol:
                return value, err, evaluations
        previous = value
    raise ToleranceNotReachedError(
        f"quadrature stalled above abs_tol={abs_tol:g} after {max_levels} levels")


def _arm_integrand(f, df, weight, anchor: float, sign: float):
    """Integrand in s after the substitution rho = anchor + sign * s^2.

    Where roundoff makes f non-positive (possible only within root
    tolerance of the anchor) the value is rebuilt from the first-order
    Taylor model of f at its simple root, and s = 0 itself gets the
    analytic limit 2 weight(anchor) / sqrt(|f'(anchor)|).
    """
    limit = 2.0 * weight(anchor) / math.sqrt(abs(float(df(anchor))))

    def integrand(s):
        s = np.asarray(s, dtype=float)
        rho = anchor + sign * s * s
        fval = np.array(f(rho), dtype=float, copy=True)
        bad = ~(fval > 0.0)
        if bad.any():
            slope = sign * np.asarray(df(rho), dtype=float)
            model = np.maximum(slope, 1e-300) * s * s
            fval[bad] = np.broadcast_to(model, fval.shape)[bad]
        with np.errstate(invalid="ignore", divide="ignore"):
            out = 2.0 * s * weight(rho) / np.sqrt(fval)
        return np.where(s == 0.0, limit, out)

    return integrand


def turning_arc_integral(
    f,
    df,
    weight,
    r_min: float,
    r_max: float,
    upper: float | None = None,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> tuple[float, float, int]:
    """Integral of weight(rho)/sqrt(f(rho)) from r_min up to ``upper``.

    ``f`` must vanish linearly at r_min and r_max and be positive in
    between; ``df`` is its derivative (used only to absorb
    roundoff-negative values of f next to the roots).  Returns
    (value, err_estimate, evaluations).
    """
    if upper is None:
        upper = r_max
    width = r_max - r_min
    slack = 1e-12 * max(width, abs(r_max))
    if upper < r_min - slack or upper > r_max + slack:
        raise OutsideRadialRangeError(
            f"radius {upper!r} outside [{r_min!r}, {r_max!r}]")
    upper = min(max(upper, r_min), r_max)
    if upper == r_min:
        return 0.0, 0.0, 0

    mid = 0.5 * (r_min + r_max)
    lower_arm = _arm_integrand(f, df, weight, r_min, +1.0)
    if upper <= mid:
        return _refine_smooth(lower_arm, 0.0, math.sqrt(upper - r_min),
                              config.abs_tol, config.max_levels)
    budget = 0.5 * config.abs_tol
    v1, e1, n1 = _refine_smooth(lower_arm, 0.0, math.sqrt(mid - r_min),
                                budget, config.max_levels)
    upper_arm = _arm_integrand(f, df, weight, r_max, -1.0)
    v2, e2, n2 = _refine_smooth(upper_arm, math.sqrt(r_max - upper),
                                math.sqrt(r_max - mid), budget, config.max_levels)
    return v1 + v2, e1 + e2, n1 + n2


def sweep_angle(
    params: OrbitParams,
    tp: TurningPoints,
    r: float,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Polar angle swept from the inner turning point to radius r.

    Strictly increasing in r; equals the apsidal angle at r = r_max.
    """
    value, _, _ = turning_arc_integral(
        params.radial_function, params.radial_function_derivative,
        lambda rho: 1.0 / rho, tp.r_min, tp.r_max, r, config)
    return value


def apsidal_angle(
    params: OrbitParams,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
    tp: TurningPoints | None = None,
) -> ApsidalResult:
    """Apsidal angle of a bounded orbit with simple turning points."""
    if tp is None:
        tp = find_turning_points(params)
    phi, err, n = turning_arc_integral(
        params.radial_function, params.radial_function_derivative,
        lambda rho: 1.0 / rho, tp.r_min, tp.r_max, tp.r_max, config)
    return ApsidalResult(phi=phi, err_estimate=err, evaluations=n)


def radial_period(
    params: OrbitParams,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
    tp: TurningPoints | None = None,
) -> float:
    """Time of one full radial oscillation r_min -> r_max -> r_min."""
    if tp is None:
        tp = find_turning_points(params)
    L = params.angular_momentum
    value, _, _ = turning_arc_integral(
        params.radial_function, params.radial_function_derivative,
        lambda rho: 2.0 * rho / L, tp.r_min, tp.r_max, tp.r_max, config)
    return value


class SweepProfile:
    """Precomputed sweep(r) for one bounded orbit.

    Tabulates the substituted integrands of both halves on dense grids
    and integrates their cubic-spline fits, so that per-sample evaluation
    (thousands of radii along a trajectory) costs a spline lookup instead
    of a fresh adaptive quadrature.  Agreement with :func:`sweep_angle`
    is at the 1e-10 level for the built-in families.
    """

    def __init__(
        self,
        params: OrbitParams,
        tp: TurningPoints,
        config: QuadratureConfig = DEFAULT_QUADRATURE,
        nodes: int = 4000,
    ) -> None:
        self._tp = tp
        self._mid = 0.5 * (tp.r_min + tp.r_max)
        f = params.radial_function
        df = params.radial_function_derivative
        weight = lambda rho: 1.0 / rho

        s_end = math.sqrt(self._mid - tp.r_min)
        s = np.linspace(0.0, s_end, nodes)
        lower = _arm_integrand(f, df, weight, tp.r_min, +1.0)
        self._lower = CubicSpline(s, lower(s)).antiderivative()

        t_end = math.sqrt(tp.r_max - self._mid)
        t = np.linspace(0.0, t_end, nodes)
        upper = _arm_integrand(f, df, weight, tp.r_max, -1.0)
        self._upper = CubicSpline(t, upper(t)).antiderivative()

        self.apsidal = float(self._lower(s_end) + self._upper(t_end))

    @property
    def turning_points(self) -> TurningPoints:
        return self._tp

    def angle(self, r):
        """sweep(r) for scalar or array r inside [r_min, r_max]."""
        r = np.asarray(r, dtype=float)
        tp = self._tp
        slack = 1e-9 * tp.width
        if np.any(r < tp.r_min - slack) or np.any(r > tp.r_max + slack):
            raise OutsideRadialRangeError(
                f"radius outside [{tp.r_min!r}, {tp.r_max!r}]")
        low = self._lower(np.sqrt(np.clip(r - tp.r_min, 0.0, None)))
        high = self.apsidal - self._upper(np.sqrt(np.clip(tp.r_max - r, 0.0, None)))
        out = np.where(r <= self._mid, low, high)
        return float(out) if out.ndim == 0 else out
