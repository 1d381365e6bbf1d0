"""Independent reference computations for cross-checking.

The kernels are recomputed from their momentum-space representation

    f_hat(chi) = -(6/pi) int_0^inf j1(x)^2 (2 cos(chi x) + 1) dx,

with the non-oscillating part taken as ``int j1^2 = pi/6``, and the averaged
force is recomputed with a composite Simpson rule on a uniform grid.  Nothing
in the production path calls into this module.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .kernels import DomainError, TestBody, geometric_factor_A_hat, kernel_f_hat, kernel_g_hat
from .quadrature import OscillatorySpec, bessel_product_integral, integrate_oscillatory_bessel

__all__ = [
    "OracleReport",
    "f_hat_momentum_space",
    "g_hat_via_relation",
    "A_hat_momentum_space",
    "force_grid_oracle",
    "sweep_f_hat",
    "sweep_g_hat",
    "sweep_A_hat",
    "norm_identity",
    "run_all_sweeps",
    "DEFAULT_TOLERANCE",
]

DEFAULT_TOLERANCE = 1e-6


@dataclass
class OracleReport:
    quantity: str
    grid: list
    max_abs_err: float
    max_rel_err: float
    tolerance: float
    passed: bool

    def to_dict(self):
        return asdict(self)


def f_hat_momentum_space(chi: float, osc_spec: OscillatorySpec | None = None) -> float:
    return -12.0 / math.pi * integrate_oscillatory_bessel(chi, osc_spec) - 1.0


def g_hat_via_relation(xi: float, osc_spec: OscillatorySpec | None = None) -> float:
    """g kernel from the momentum-space f kernel, never touching the g closed form."""
    return -0.5 * f_hat_momentum_space(xi, osc_spec) - 1.5


def A_hat_momentum_space(kappa: float, osc_spec: OscillatorySpec | None = None) -> float:
    """Geometric factor as the time average of the momentum-space f kernel.

    Integrating ``cos(chi x)`` over chi in [0, kappa] gives ``sin(kappa x)/x``,
    so ``kappa^2 A_hat = -(12/pi) int j1^2 sin(kappa x)/x dx - kappa``.
    """
    if not kappa > 0:
        raise DomainError("kappa must be > 0")
    s = bessel_product_integral(kappa, "sin", 1, osc_spec)
    return (-12.0 / math.pi * s - kappa) / kappa**2


def _simpson(y, h):
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())


def _grid_force(traj, body, n_points, min_panel):
    R = body.radius_R
    tau = traj.tau
    edges = {0.0, tau}
    for b in (traj.delta_t, tau - traj.delta_t, tau - 2.0 * R):
        if 0.0 < b < tau:
            edges.add(b)
    edges = sorted(edges)
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        n = max(int(n_points * (hi - lo) / tau), min_panel)
        n += n % 2
        t = np.linspace(lo, hi, n + 1)
        q = traj.unit_profile(t)
        # evaluate the kernel from inside the segment so the branch at the
        # kink is consistent with the segment's one-sided limit
        chi = np.clip((tau - t) / R, 0.0, None)
        mid_chi = (tau - 0.5 * (lo + hi)) / R
        if mid_chi < 2.0:
            fk = 0.5 * (chi - 2.0) * (2.0 - 2.0 * chi - chi * chi) - 1.0
        else:
            fk = np.full_like(chi, -1.0)
        total += _simpson(q * fk, (hi - lo) / n)
    return body.force_scale * traj.Q_plateau * total / (tau / R) / R


def force_grid_oracle(traj, body: TestBody, n_points: int = 100_000,
                      min_panel: int = 1000, check_doubling: bool = True) -> float:
    """Average self-force by composite Simpson on a breakpoint-aligned grid.

    Each smooth segment between ``{delta_t, tau - delta_t, tau - 2R}`` gets a
    share of `n_points` proportional to its length (at least `min_panel`
    intervals).  With `check_doubling`, the grid is doubled and a
    ``RuntimeWarning`` is issued if the relative change exceeds 1e-9.
    """
    if n_points < 100_000:
        raise DomainError("n_points must be >= 1e5")
    coarse = _grid_force(traj, body, n_points, min_panel)
    if check_doubling:
        fine = _grid_force(traj, body, 2 * n_points, 2 * min_panel)
        if abs(fine - coarse) > 1e-9 * abs(fine):
            warnings.warn(f"grid oracle not converged: doubling changed the result by "
                          f"{abs(fine - coarse) / abs(fine):.3g} (relative)",
                          RuntimeWarning, stacklevel=2)
    return coarse


def _report(quantity, grid, oracle_vals, closed_vals, tolerance):
    oracle_vals = np.asarray(oracle_vals)
    closed_vals = np.asarray(closed_vals)
    abs_err = np.abs(oracle_vals - closed_vals)
    scale = np.maximum(np.abs(closed_vals), np.finfo(float).tiny)
    max_abs = float(abs_err.max())
    return OracleReport(quantity, [float(g) for g in grid], max_abs,
                        float((abs_err / scale).max()), tolerance, max_abs <= tolerance)


def sweep_f_hat(grid=None, tolerance=DEFAULT_TOLERANCE, osc_spec=None) -> OracleReport:
    grid = np.linspace(0.0, 4.0, 101) if grid is None else np.asarray(grid, dtype=float)
    vals = [f_hat_momentum_space(c, osc_spec) for c in grid]
    return _report("f_hat", grid, vals, kernel_f_hat(grid), tolerance)


def sweep_g_hat(grid=None, tolerance=DEFAULT_TOLERANCE, osc_spec=None) -> OracleReport:
    grid = np.linspace(0.0, 4.0, 101) if grid is None else np.asarray(grid, dtype=float)
    vals = [g_hat_via_relation(x, osc_spec) for x in grid]
    return _report("g_hat", grid, vals, kernel_g_hat(grid), tolerance)


def sweep_A_hat(grid=None, tolerance=DEFAULT_TOLERANCE, osc_spec=None) -> OracleReport:
    grid = np.linspace(0.2, 5.0, 25) if grid is None else np.asarray(grid, dtype=float)
    vals = [A_hat_momentum_space(k, osc_spec) for k in grid]
    return _report("A_hat", grid, vals, geometric_factor_A_hat(grid), tolerance)


def norm_identity(tolerance=1e-8, osc_spec=None) -> OracleReport:
    """int_0^inf j1^2 dx against pi/6."""
    val = integrate_oscillatory_bessel(0.0, osc_spec)
    return _report("j1_norm", [0.0], [val], [math.pi / 6.0], tolerance)


def run_all_sweeps(tolerance=DEFAULT_TOLERANCE, osc_spec=None):
    return [
        sweep_f_hat(tolerance=tolerance, osc_spec=osc_spec),
        sweep_g_hat(tolerance=tolerance, osc_spec=osc_spec),
        sweep_A_hat(tolerance=tolerance, osc_spec=osc_spec),
        norm_identity(tolerance=min(tolerance, 1e-8), osc_spec=osc_spec),
    ]
