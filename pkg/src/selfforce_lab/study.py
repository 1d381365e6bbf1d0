"""Time-averaged self-force, its sharp-step limits, bounds and sweeps.

Internally everything is computed per unit displacement in units R = c = 1:

    I_f = (1/kappa) * int_0^kappa q(t) f_hat(kappa - t) dt
    I_g = (1/kappa) * int_0^kappa q(t) g_hat(t) dt

with ``q = Q(t) / Q_plateau``.  A force is then ``rho_c^2 V^2 Q / R^3 * I``
and its dimensionless counterpart ``sign(Q) * I``.  Ratios are formed from the
``I`` values and stay defined when Q = 0.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .kernels import (
    DomainError,
    TestBody,
    geometric_factor_A_hat,
    kernel_f_hat,
    kernel_g_hat,
    rr_force_hat_BR,
)
from .quadrature import QuadratureSpec, integrate
from .trajectories import (
    DEFAULT_SPEED_LIMIT_FRACTION,
    BRStepTrajectory,
    Trajectory,
    shrink_sequence,
    validate_physicality,
)

__all__ = [
    "PhysicalityError",
    "AveragedForce",
    "ForceReport",
    "ConvergenceRow",
    "UncertaintyCurve",
    "average_self_force",
    "average_Q_force",
    "end_interval_forces",
    "decompose",
    "convergence_study",
    "uncertainty_curves",
    "no_neutralizing_body_force",
    "bound_initial",
    "bound_ratio",
]


class PhysicalityError(ValueError):
    """Trajectory violates |Q| << R or v_max << c under strict checking."""

    def __init__(self, violations):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


class AveragedForce(NamedTuple):
    force: float
    hat: float
    err_est: float


def _check(traj, body, strict, speed_limit_fraction=DEFAULT_SPEED_LIMIT_FRACTION):
    if strict:
        violations = validate_physicality(traj, body, speed_limit_fraction)
        if violations:
            raise PhysicalityError(violations)


def _unit_integral(traj, body, kernel, kernel_break, lo, hi, spec):
    """(1/kappa) * int_lo^hi q(t) kernel(arg(t)) dt, all in units of R."""
    R = body.radius_R
    kappa = traj.tau / R
    lo, hi = lo / R, hi / R
    if hi <= lo:
        return 0.0, 0.0
    if kernel is kernel_f_hat:
        def fn(t):
            return traj.unit_profile(t * R) * kernel_f_hat(np.maximum(kappa - t, 0.0))
    else:
        def fn(t):
            return traj.unit_profile(t * R) * kernel_g_hat(np.maximum(t, 0.0))
    candidates = [b / R for b in traj.breakpoints()] + [kernel_break]
    # drop joins that are closer than a rounding error to an edge or each other
    gap = 64 * np.finfo(float).eps * max(kappa, 1.0)
    bps = []
    for b in sorted(candidates):
        if lo + gap < b < hi - gap and (not bps or b - bps[-1] > gap):
            bps.append(b)
    value, err = integrate(fn, lo, hi, spec.with_breakpoints(bps))
    return value / kappa, err / kappa


def _f_unit(traj, body, spec, lo=0.0, hi=None):
    kappa = traj.tau / body.radius_R
    return _unit_integral(traj, body, kernel_f_hat, kappa - 2.0, lo,
                          traj.tau if hi is None else hi, spec)


def _g_unit(traj, body, spec):
    return _unit_integral(traj, body, kernel_g_hat, 2.0, 0.0, traj.tau, spec)


def _as_force(unit, err, traj, body):
    Q = traj.Q_plateau
    scale = body.force_scale
    return AveragedForce(scale * Q * unit, math.copysign(1.0, Q) * unit if Q else 0.0,
                         scale * abs(Q) * err)


def average_self_force(traj, body: TestBody, spec: QuadratureSpec | None = None,
                       strict: bool = False) -> AveragedForce:
    """Time average over (0, tau) of the self-force for trajectory `traj`.

    Breakpoints are placed at the ramp joins and at t = tau - 2R where the
    kernel has its kink.  With ``strict=True`` a trajectory violating the
    smallness constraints raises `PhysicalityError`.
    """
    _check(traj, body, strict)
    unit, err = _f_unit(traj, body, spec or QuadratureSpec())
    return _as_force(unit, err, traj, body)


def average_Q_force(traj, body: TestBody, spec: QuadratureSpec | None = None,
                    strict: bool = False) -> AveragedForce:
    """Time average of the force component proportional to Q(t)."""
    _check(traj, body, strict)
    unit, err = _g_unit(traj, body, spec or QuadratureSpec())
    return _as_force(unit, err, traj, body)


def end_interval_forces(traj, body: TestBody, spec: QuadratureSpec | None = None):
    """Contributions of the initial and final ramp intervals to the average force."""
    spec = spec or QuadratureSpec()
    dt = traj.delta_t
    if dt == 0:
        zero = AveragedForce(0.0, 0.0, 0.0)
        return zero, zero
    first = _f_unit(traj, body, spec, 0.0, dt)
    last = _f_unit(traj, body, spec, traj.tau - dt, traj.tau)
    return _as_force(*first, traj, body), _as_force(*last, traj, body)


def _slope_ratio(traj) -> float:
    return 0.0 if isinstance(traj, BRStepTrajectory) else traj.shape.max_slope


def bound_initial(traj, body: TestBody) -> float:
    """Upper bound on |contribution| of either ramp interval.

    ``rho_c^2 V^2 v_max (3/R^3) delta_t^2 / tau``.
    """
    if isinstance(traj, BRStepTrajectory):
        return 0.0
    return body.force_scale * 3.0 * traj.v_max * traj.delta_t**2 / traj.tau


def bound_ratio(traj, body: TestBody) -> float:
    """Upper bound on |ramp contribution / step-limit force|.

    ``24 / [(4+k)(2-k)^2 Theta(2-k) + 8] * (v_max/v_bar) * (delta_t/tau)``
    with ``k = tau / R``.
    """
    kappa = traj.tau / body.radius_R
    d = max(2.0 - kappa, 0.0)
    return 24.0 / ((4.0 + kappa) * d * d + 8.0) * _slope_ratio(traj) * traj.delta_t / traj.tau


@dataclass
class ForceReport:
    kappa: float
    delta_t_over_tau: float
    Q_plateau: float
    F_bar: float
    F_bar_BR: float
    F_bar_Q: float
    F_bar_RR: float
    F_bar_Q_BR: float
    F_bar_RR_BR: float
    delta_F_initial: float
    delta_F_final: float
    ratio_F_to_BR: float
    ratio_FQ_to_QBR: float
    ratio_FRR_to_RRBR: Optional[float]
    bound_initial: float
    bound_ratio: float
    F_hat: float
    F_hat_BR: float
    F_hat_Q: float
    F_hat_RR: float
    F_hat_Q_BR: float
    F_hat_RR_BR: float
    delta_F_hat_initial: float
    delta_F_hat_final: float
    bound_initial_hat: float
    err_est: float
    violations: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def decompose(traj, body: TestBody, spec: QuadratureSpec | None = None,
              strict: bool = False,
              speed_limit_fraction: float = DEFAULT_SPEED_LIMIT_FRACTION) -> ForceReport:
    """All averaged forces, their sharp-step limits, ratios and bounds.

    ``ratio_FRR_to_RRBR`` is ``None`` when the step-limit radiation-reaction
    force vanishes (kappa >= 2).
    """
    spec = spec or QuadratureSpec()
    violations = validate_physicality(traj, body, speed_limit_fraction)
    if strict and violations:
        raise PhysicalityError(violations)
    kappa = traj.tau / body.radius_R
    Q = traj.Q_plateau
    scale = body.force_scale
    sign = math.copysign(1.0, Q) if Q else 0.0

    f_unit, f_err = _f_unit(traj, body, spec)
    g_unit, g_err = _g_unit(traj, body, spec)
    first, last = end_interval_forces(traj, body, spec)

    br_unit = kappa * geometric_factor_A_hat(kappa)
    qbr_unit = -0.5 * br_unit - 1.5
    rrbr_unit = rr_force_hat_BR(kappa)
    rr_unit = f_unit - g_unit

    F_bar = scale * Q * f_unit
    F_bar_Q = scale * Q * g_unit
    return ForceReport(
        kappa=kappa,
        delta_t_over_tau=traj.delta_t / traj.tau,
        Q_plateau=Q,
        F_bar=F_bar,
        F_bar_BR=scale * Q * br_unit,
        F_bar_Q=F_bar_Q,
        F_bar_RR=F_bar - F_bar_Q,
        F_bar_Q_BR=scale * Q * qbr_unit,
        F_bar_RR_BR=scale * Q * rrbr_unit + 0.0,
        delta_F_initial=first.force,
        delta_F_final=last.force,
        ratio_F_to_BR=f_unit / br_unit,
        ratio_FQ_to_QBR=g_unit / qbr_unit,
        ratio_FRR_to_RRBR=rr_unit / rrbr_unit if rrbr_unit != 0 else None,
        bound_initial=bound_initial(traj, body),
        bound_ratio=bound_ratio(traj, body),
        F_hat=sign * f_unit,
        F_hat_BR=sign * br_unit,
        F_hat_Q=sign * g_unit,
        F_hat_RR=sign * rr_unit,
        F_hat_Q_BR=sign * qbr_unit,
        F_hat_RR_BR=sign * rrbr_unit + 0.0,
        delta_F_hat_initial=first.hat,
        delta_F_hat_final=last.hat,
        bound_initial_hat=0.0 if isinstance(traj, BRStepTrajectory)
        else 3.0 * traj.shape.max_slope * traj.delta_t / traj.tau,
        err_est=scale * abs(Q) * (f_err + g_err),
        violations=[str(v) for v in violations],
    )


@dataclass(frozen=True)
class ConvergenceRow:
    delta_t_over_tau: float
    ratio_F_to_BR: float
    ratio_FQ_to_QBR: float
    # None when the step-limit radiation-reaction force is zero (kappa >= 2)
    ratio_FRR_to_RRBR: Optional[float]
    F_hat_RR: float
    bound_15_value: float


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def convergence_study(base: Trajectory, body: TestBody, n_steps: int,
                      spec: QuadratureSpec | None = None, workers: int | None = None):
    """Decompose along `shrink_sequence(base, n_steps)`, largest delta_t first."""
    spec = spec or QuadratureSpec()

    def row(traj):
        rep = decompose(traj, body, spec)
        return ConvergenceRow(
            delta_t_over_tau=rep.delta_t_over_tau,
            ratio_F_to_BR=rep.ratio_F_to_BR,
            ratio_FQ_to_QBR=rep.ratio_FQ_to_QBR,
            ratio_FRR_to_RRBR=rep.ratio_FRR_to_RRBR,
            F_hat_RR=rep.F_hat_RR,
            bound_15_value=rep.bound_ratio,
        )

    return _map(row, shrink_sequence(base, n_steps), workers)


@dataclass(frozen=True)
class UncertaintyCurve:
    """Order-of-magnitude field uncertainties (coefficient set to 1)."""

    kappa_grid: tuple
    delta_E_full: tuple
    delta_E_RR_only: tuple
    R: float = 1.0
    hbar: float = 1.0


def uncertainty_curves(kappa_grid, R: float = 1.0, hbar: float = 1.0) -> UncertaintyCurve:
    """Minimum field uncertainty with and without the electrostatic part.

    ``delta_E_full = (hbar |A_hat(kappa)| / R^4)^(1/2)`` and
    ``delta_E_RR_only = (hbar / (tau R^3))^(1/2) (2 - kappa) Theta(2 - kappa)``
    with ``tau = kappa R``.
    """
    kappa = np.asarray(kappa_grid, dtype=float)
    if kappa.ndim != 1 or kappa.size == 0:
        raise DomainError("kappa_grid must be a non-empty 1-D sequence")
    if not (R > 0 and hbar > 0):
        raise DomainError("R and hbar must be positive")
    full = np.sqrt(hbar * np.abs(geometric_factor_A_hat(kappa)) / R**4)
    rr = np.sqrt(hbar / (kappa * R * R**3)) * np.maximum(2.0 - kappa, 0.0)
    return UncertaintyCurve(tuple(kappa.tolist()), tuple(full.tolist()), tuple(rr.tolist()),
                            R, hbar)


def no_neutralizing_body_force(traj, body: TestBody, spec: QuadratureSpec | None = None,
                               strict: bool = False) -> AveragedForce:
    """Average self-force with the neutralizing body absent.

    The electrostatic attraction ``-rho_c^2 V^2 Q(t) / R^3`` is removed using
    the time average of Q(t), so the step limit is ``kappa A_hat + 1``.
    """
    spec = spec or QuadratureSpec()
    _check(traj, body, strict)
    f_unit, f_err = _f_unit(traj, body, spec)
    bps = [b for b in traj.breakpoints() if 0 < b < traj.tau]
    mean_q, q_err = integrate(traj.unit_profile, 0.0, traj.tau, spec.with_breakpoints(bps))
    mean_q /= traj.tau
    return _as_force(f_unit + mean_q, f_err + q_err / traj.tau, traj, body)
