"""Central potentials with closed-form first derivatives.

Four families are built in: Kepler ``-1/r``, isotropic Hooke
``omega^2 r^2 / 2``, power-law ``r^p / p`` (p > -2, p != 0) and
logarithmic ``ln r``.  The power-law normalization makes the radial
force ``U'(r) = r^(p-1)`` and recovers the logarithmic family in the
p -> 0 limit; exponents p <= -2 are rejected because the centrifugal
barrier no longer dominates at small radii and bounded two-turning-point
orbits are not guaranteed.

All evaluations accept scalars or numpy arrays and are pure functions of
immutable inputs, so potentials can be shared freely across threads.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidPotentialError, NonPositiveRadiusError

__all__ = ["PotentialKind", "Potential", "parse_potential", "check_derivative"]


class PotentialKind(enum.Enum):
    KEPLER = "kepler"
    HOOKE = "hooke"
    POWER_LAW = "powerlaw"
    LOG = "log"


def _check_radius(r):
    if not np.all(np.asarray(r) > 0.0):
        raise NonPositiveRadiusError(f"radius must be positive, got {r!r}")


@dataclass(frozen=True)
class Potential:
    """Immutable description of a central potential U(r).

    Use the classmethod constructors (:meth:`kepler`, :meth:`hooke`,
    :meth:`power_law`, :meth:`logarithmic`) rather than filling fields
    by hand; unused fields keep their defaults.
    """

    kind: PotentialKind
    omega: float = 1.0      # Hooke angular frequency, > 0
    exponent: float = 0.0   # power-law exponent p, -2 < p, p != 0

    def __post_init__(self) -> None:
        if self.kind is PotentialKind.HOOKE:
            if not (math.isfinite(self.omega) and self.omega > 0.0):
                raise InvalidPotentialError(
                    f"hooke frequency must be positive, got omega={self.omega!r}")
        if self.kind is PotentialKind.POWER_LAW:
            p = self.exponent
            if not (math.isfinite(p) and p > -2.0):
                raise InvalidPotentialError(
                    f"power-law exponent must satisfy p > -2, got p={p!r}")
            if p == 0.0:
                raise InvalidPotentialError(
                    "power-law exponent p=0 is excluded; use the logarithmic variant")

    @classmethod
    def kepler(cls) -> "Potential":
        return cls(PotentialKind.KEPLER)

    @classmethod
    def hooke(cls, omega: float) -> "Potential":
        return cls(PotentialKind.HOOKE, omega=float(omega))

    @classmethod
    def power_law(cls, exponent: float) -> "Potential":
        return cls(PotentialKind.POWER_LAW, exponent=float(exponent))

    @classmethod
    def logarithmic(cls) -> "Potential":
        return cls(PotentialKind.LOG)

    def value(self, r):
        """U(r).  Raises NonPositiveRadiusError for r <= 0."""
        _check_radius(r)
        if self.kind is PotentialKind.KEPLER:
            return -1.0 / r
        if self.kind is PotentialKind.HOOKE:
            return 0.5 * self.omega * self.omega * r * r
        if self.kind is PotentialKind.POWER_LAW:
            return r ** self.exponent / self.exponent
        return np.log(r)

    def derivative(self, r):
        """U'(r), the attractive radial force per unit mass."""
        _check_radius(r)
        if self.kind is PotentialKind.KEPLER:
            return 1.0 / (r * r)
        if self.kind is PotentialKind.HOOKE:
            return self.omega * self.omega * r
        if self.kind is PotentialKind.POWER_LAW:
            return r ** (self.exponent - 1.0)
        return 1.0 / r

    @property
    def escape_energy(self) -> float:
        """Smallest energy at which the motion is unbounded (inf if confining)."""
        if self.kind is PotentialKind.KEPLER:
            return 0.0
        if self.kind is PotentialKind.POWER_LAW and self.exponent < 0.0:
            return 0.0
        return math.inf

    @property
    def label(self) -> str:
        """Canonical grammar string, parseable by :func:`parse_potential`."""
        if self.kind is PotentialKind.HOOKE:
            return f"hooke:omega={self.omega!r}"
        if self.kind is PotentialKind.POWER_LAW:
            return f"powerlaw:p={self.exponent!r}"
        return self.kind.value


def check_derivative(pot: Potential, r: float, h: float) -> float:
    """Relative residual of a central difference of U against U'(r).

    Returns |(U(r+h) - U(r-h)) / (2h) - U'(r)| / max(1, |U'(r)|).
    Requires r > h > 0 so both sample points stay in the domain.
    """
    _check_radius(r)
    if not 0.0 < h < r:
        raise NonPositiveRadiusError(f"step must satisfy 0 < h < r, got h={h!r}, r={r!r}")
    numeric = (pot.value(r + h) - pot.value(r - h)) / (2.0 * h)
    exact = pot.derivative(r)
    return abs(numeric - exact) / max(1.0, abs(exact))


def parse_potential(text: str) -> Potential:
    """Parse the potential grammar used by the CLI and config files.

    Accepted forms: ``kepler``, ``hooke:omega=<float>``,
    ``powerlaw:p=<float>``, ``log``.  Errors name the offending token.
    """
    head, sep, tail = text.strip().partition(":")
    head = head.lower()
    if head == "kepler":
        if sep:
            raise InvalidPotentialError(f"'kepler' takes no parameters, got {tail!r}")
        return Potential.kepler()
    if head == "log":
        if sep:
            raise InvalidPotentialError(f"'log' takes no parameters, got {tail!r}")
        return Potential.logarithmic()
    if head in ("hooke", "powerlaw"):
        key_expected = "omega" if head == "hooke" else "p"
        key, eq, value = tail.partition("=")
        if not eq or not key:
            raise InvalidPotentialError(
                f"'{head}' needs '{key_expected}=<float>', got {tail!r}")
        if key != key_expected:
            raise InvalidPotentialError(
                f"unknown parameter {key!r} for '{head}' (expected {key_expected!r})")
        try:
            number = float(value)
        except ValueError:
            raise InvalidPotentialError(
                f"invalid float for '{key_expected}': {value!r}") from None
        if head == "hooke":
            return Potential.hooke(number)
        return Potential.power_law(number)
    raise InvalidPotentialError(f"unknown potential {head!r}")
