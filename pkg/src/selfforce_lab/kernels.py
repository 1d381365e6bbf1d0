"""Closed-form self-force kernels for a uniformly charged sphere.

All kernels are dimensionless: lengths and times are in units of the sphere
radius R, with c = 1.  Physical values follow by multiplying with the scale
``rho_c**2 * V**2 / R**3`` (forces) or ``1 / R**3`` / ``1 / R**4`` (kernels,
geometric factor).

Every function accepts a scalar or an array and returns the same shape.
Scalars come back as plain ``float``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DomainError",
    "TestBody",
    "MeasurementWindow",
    "KernelPoint",
    "kernel_f_hat",
    "kernel_g_hat",
    "geometric_factor_A_hat",
    "rr_force_hat_BR",
    "electrostatic_limit_force",
    "SMALL_DISPLACEMENT_RATIO",
]

# |Q|/R above which a displacement is no longer treated as small.
SMALL_DISPLACEMENT_RATIO = 0.1


class DomainError(ValueError):
    """Argument outside the domain on which a kernel is defined."""


@dataclass(frozen=True)
class TestBody:
    """Uniformly charged spherical test body (Gaussian units)."""

    __test__ = False  # keep pytest from collecting this as a test class

    radius_R: float
    charge_density_rho_c: float = 1.0
    volume_V: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.radius_R) and self.radius_R > 0):
            raise DomainError(f"radius_R must be positive and finite, got {self.radius_R!r}")
        if not math.isfinite(self.charge_density_rho_c):
            raise DomainError("charge_density_rho_c must be finite")
        object.__setattr__(self, "volume_V", 4.0 / 3.0 * math.pi * self.radius_R**3)

    @property
    def force_scale(self) -> float:
        """rho_c^2 V^2 / R^3, the force per unit displacement."""
        return self.charge_density_rho_c**2 * self.volume_V**2 / self.radius_R**3


@dataclass(frozen=True)
class MeasurementWindow:
    """Field measurement period tau and its ratio kappa = tau / R."""

    tau: float
    kappa: float

    @property
    def radius_R(self) -> float:
        return self.tau / self.kappa

    def __post_init__(self):
        if not (self.tau > 0 and self.kappa > 0):
            raise DomainError("tau and kappa must be positive")

    @classmethod
    def from_tau(cls, tau: float, body: TestBody) -> "MeasurementWindow":
        return cls(tau=tau, kappa=tau / body.radius_R)

    @classmethod
    def from_kappa(cls, kappa: float, body: TestBody) -> "MeasurementWindow":
        return cls(tau=kappa * body.radius_R, kappa=kappa)


@dataclass(frozen=True)
class KernelPoint:
    argument: float
    value: float

    def __post_init__(self):
        if not self.argument >= 0:
            raise DomainError("kernel argument must be non-negative")


def _as_array(x, name: str, strict_positive: bool = False):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if strict_positive:
        if np.any(arr <= 0):
            raise DomainError(f"{name} must be > 0")
    elif np.any(arr < 0):
        raise DomainError(f"{name} must be >= 0")
    return arr


def _out(arr):
    return float(arr) if arr.ndim == 0 else arr


def _cubic(u):
    # (u - 2)(2 - 2u - u^2) for u < 2, zero otherwise (Theta(0) = 1 is moot here)
    return np.where(u <= 2.0, (u - 2.0) * (2.0 - 2.0 * u - u * u), 0.0)


def kernel_f_hat(chi):
    """R^3 f as a function of chi = (tau - t1) / R.

    Equals -3 at chi = 0 and exactly -1 for chi >= 2.
    """
    chi = _as_array(chi, "chi")
    return _out(0.5 * _cubic(chi) - 1.0)


def kernel_g_hat(xi):
    """R^3 g as a function of xi = t2 / R.

    Related to the f kernel by g_hat(xi) = -f_hat(xi)/2 - 3/2.
    """
    xi = _as_array(xi, "xi")
    return _out(-0.25 * _cubic(xi) - 1.0)


def geometric_factor_A_hat(kappa):
    """R^4 times the geometric factor for coinciding spherical regions.

    Equals ``(1/kappa**2) * integral_0^kappa f_hat`` and reduces to
    ``-1/kappa`` for kappa >= 2.  Diverges like ``-3/kappa`` as kappa -> 0.
    """
    kappa = _as_array(kappa, "kappa", strict_positive=True)
    d = np.where(kappa <= 2.0, 2.0 - kappa, 0.0)
    return _out(-(4.0 + kappa) * d * d / (8.0 * kappa) - 1.0 / kappa)


def rr_force_hat_BR(kappa):
    """Step-trajectory radiation-reaction force in units of rho_c^2 V^2 Q / R^3.

    Zero for kappa >= 2, tends to -3 as kappa -> 0.
    """
    kappa = _as_array(kappa, "kappa", strict_positive=True)
    d = np.where(kappa <= 2.0, 2.0 - kappa, 0.0)
    # + 0.0 turns the -0.0 of the kappa >= 2 branch into 0.0
    return _out(-3.0 / 16.0 * (4.0 + kappa) * d * d + 0.0)


def electrostatic_limit_force(body: TestBody, Q: float,
                              threshold: float = SMALL_DISPLACEMENT_RATIO) -> float:
    """Attraction -rho_c^2 V^2 Q / R^3 between test and neutralizing body.

    Valid for |Q| << R; a ``RuntimeWarning`` is issued when ``|Q|/R`` exceeds
    `threshold`.
    """
    if not math.isfinite(Q):
        raise DomainError("Q must be finite")
    if abs(Q) / body.radius_R >= threshold:
        warnings.warn(
            f"|Q|/R = {abs(Q) / body.radius_R:.3g} is not small (threshold {threshold})",
            RuntimeWarning,
            stacklevel=2,
        )
    return -body.force_scale * Q
