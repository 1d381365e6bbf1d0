"""Smoothed-step displacement profiles Q(t) of the test body.

A trajectory ramps from 0 to a plateau value in a time ``delta_t``, holds the
plateau, and ramps back to 0 at ``tau``.  Times and lengths share one unit
(c = 1).  `BRStepTrajectory` is the sharp-step limit ``delta_t -> 0``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .kernels import SMALL_DISPLACEMENT_RATIO, DomainError, TestBody

__all__ = [
    "RampShape",
    "LINEAR",
    "SMOOTHSTEP",
    "COSINE",
    "RAMP_SHAPES",
    "Trajectory",
    "BRStepTrajectory",
    "Violation",
    "evaluate_Q",
    "validate_physicality",
    "shrink_sequence",
    "DEFAULT_SPEED_LIMIT_FRACTION",
]

DEFAULT_SPEED_LIMIT_FRACTION = 0.1


@dataclass(frozen=True)
class RampShape:
    """Monotone ramp s(u) on [0, 1] with s(0) = 0, s(1) = 1."""

    tag: str
    s: Callable = field(repr=False, compare=False)
    max_slope: float

    def __call__(self, u):
        return self.s(u)


LINEAR = RampShape("linear", lambda u: u, 1.0)
SMOOTHSTEP = RampShape("smoothstep", lambda u: u * u * (3.0 - 2.0 * u), 1.5)
COSINE = RampShape("cosine", lambda u: 0.5 * (1.0 - np.cos(np.pi * u)), 0.5 * math.pi)

RAMP_SHAPES = {shape.tag: shape for shape in (LINEAR, SMOOTHSTEP, COSINE)}


def _shape(shape) -> RampShape:
    if isinstance(shape, RampShape):
        return shape
    try:
        return RAMP_SHAPES[shape]
    except KeyError:
        raise DomainError(f"unknown ramp shape {shape!r}; expected one of {sorted(RAMP_SHAPES)}") from None


@dataclass(frozen=True)
class Trajectory:
    Q_plateau: float
    delta_t: float
    tau: float
    shape: RampShape = SMOOTHSTEP

    def __post_init__(self):
        object.__setattr__(self, "shape", _shape(self.shape))
        if not all(math.isfinite(v) for v in (self.Q_plateau, self.delta_t, self.tau)):
            raise DomainError("trajectory parameters must be finite")
        if not self.tau > 0:
            raise DomainError("tau must be positive")
        if not 0 < self.delta_t <= 0.5 * self.tau:
            raise DomainError(f"need 0 < delta_t <= tau/2, got delta_t={self.delta_t}, tau={self.tau}")
        if self.delta_t == 0.5 * self.tau:
            warnings.warn("delta_t = tau/2 leaves no plateau", RuntimeWarning, stacklevel=3)

    @property
    def v_bar(self) -> float:
        """Mean ramp speed |Q| / delta_t."""
        return abs(self.Q_plateau) / self.delta_t

    @property
    def v_max(self) -> float:
        return self.v_bar * self.shape.max_slope

    def breakpoints(self):
        """Interior joins between ramps and plateau."""
        return sorted({self.delta_t, self.tau - self.delta_t} - {0.0, self.tau})

    def unit_profile(self, t):
        """Q(t) / Q_plateau, vectorized, no domain check."""
        t = np.asarray(t, dtype=float)
        u_up = np.clip(t / self.delta_t, 0.0, 1.0)
        u_down = np.clip((self.tau - t) / self.delta_t, 0.0, 1.0)
        return np.minimum(self.shape(u_up), self.shape(u_down))

    def __call__(self, t):
        return evaluate_Q(self, t)


@dataclass(frozen=True)
class BRStepTrajectory:
    """Q(t) = Q * Theta(t) * Theta(tau - t), with Theta(0) = 1."""

    Q_plateau: float
    tau: float

    delta_t = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.Q_plateau) and self.tau > 0):
            raise DomainError("need finite Q_plateau and tau > 0")

    def breakpoints(self):
        return []

    def unit_profile(self, t):
        return np.ones_like(np.asarray(t, dtype=float))

    def __call__(self, t):
        return evaluate_Q(self, t)


def evaluate_Q(traj, t):
    """Displacement at time(s) `t` in ``[0, tau]``."""
    arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > traj.tau):
        raise DomainError(f"t must lie in [0, {traj.tau}]")
    out = traj.Q_plateau * traj.unit_profile(arr)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Violation:
    constraint: str
    ratio: float
    limit: float

    def __str__(self):
        return f"{self.constraint}: ratio {self.ratio:.6g} (limit {self.limit:.6g})"


def validate_physicality(traj, body: TestBody,
                         speed_limit_fraction: float = DEFAULT_SPEED_LIMIT_FRACTION,
                         displacement_limit: float = SMALL_DISPLACEMENT_RATIO):
    """List the violated smallness constraints (empty when all pass).

    Checks ``v_max < speed_limit_fraction * c`` and ``|Q| < displacement_limit * R``.
    A sharp step has unbounded speed unless Q = 0.
    """
    if not 0 < speed_limit_fraction <= 1:
        raise DomainError("speed_limit_fraction must lie in (0, 1]")
    violations = []
    if isinstance(traj, BRStepTrajectory):
        v_max = math.inf if traj.Q_plateau != 0 else 0.0
    else:
        v_max = traj.v_max
    if v_max >= speed_limit_fraction:
        violations.append(Violation("v_max >= limit", v_max, speed_limit_fraction))
    q_ratio = abs(traj.Q_plateau) / body.radius_R
    if q_ratio >= displacement_limit:
        violations.append(Violation("|Q| << R fails", q_ratio, displacement_limit))
    return violations


def shrink_sequence(base: Trajectory, n_steps: int):
    """Halve delta_t `n_steps - 1` times at fixed mean and peak speed.

    The plateau shrinks with the ramp, ``Q_k = v_bar * delta_t_k``.
    """
    if n_steps < 1:
        raise DomainError("n_steps must be >= 1")
    # powers of two keep Q_k / delta_t_k bit-identical along the sequence
    return [replace(base, delta_t=base.delta_t * 2.0**-k, Q_plateau=base.Q_plateau * 2.0**-k)
            for k in range(n_steps)]
