"""Acceptance criteria, one test each, at their stated tolerances.

Every test records a line in ``conftest.ACCEPTANCE_RESULTS``; the terminal
summary prints one ``[PASS]``/``[FAIL]`` line per criterion.
"""
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_RESULTS
from selfforce_lab import cli
from selfforce_lab.kernels import (
    TestBody,
    geometric_factor_A_hat,
    kernel_f_hat,
    kernel_g_hat,
    rr_force_hat_BR,
)
from selfforce_lab.oracles import force_grid_oracle, sweep_f_hat
from selfforce_lab.quadrature import QuadratureSpec, integrate
from selfforce_lab.study import (
    average_self_force,
    decompose,
    no_neutralizing_body_force,
    uncertainty_curves,
)
from selfforce_lab.trajectories import RAMP_SHAPES, BRStepTrajectory, Trajectory


def record(number, title, passed, detail):
    ACCEPTANCE_RESULTS.append((number, title, bool(passed), detail))
    assert passed, f"criterion {number} ({title}) failed: {detail}"


def test_01_momentum_space_oracle():
    start = time.perf_counter()
    report = sweep_f_hat(grid=np.linspace(0.0, 4.0, 101), tolerance=1e-6)
    elapsed = time.perf_counter() - start
    record(1, "f_hat vs momentum-space oracle", report.passed and elapsed <= 30.0,
           f"max abs err {report.max_abs_err:.2e} on 101 points, {elapsed:.2f} s")


def test_02_geometric_factor():
    spec = QuadratureSpec(rel_tol=1e-13, abs_tol=1e-15)
    worst = 0.0
    for kappa in np.linspace(0.2, 5.0, 25):
        bps = (2.0,) if kappa > 2.0 else ()
        val, _ = integrate(kernel_f_hat, 0.0, kappa, spec.with_breakpoints(bps))
        worst = max(worst, abs(val / kappa**2 - geometric_factor_A_hat(kappa)))
    exact_two = geometric_factor_A_hat(2.0) == -0.5
    beyond = np.linspace(2.0, 50.0, 97)
    exact_tail = bool(np.all(geometric_factor_A_hat(beyond) == -1.0 / beyond))
    record(2, "A_hat vs (1/k^2) int f_hat", worst <= 1e-10 and exact_two and exact_tail,
           f"max abs err {worst:.2e}; A_hat(2) = {geometric_factor_A_hat(2.0)}; "
           f"A_hat(k>=2) == -1/k: {exact_tail}")


def test_03_g_f_relation():
    xi = np.random.default_rng(3).uniform(0.0, 6.0, 200)
    err = float(np.max(np.abs(kernel_g_hat(xi) - (-0.5 * kernel_f_hat(xi) - 1.5))))
    record(3, "g_hat = -f_hat/2 - 3/2", err <= 1e-14 and kernel_g_hat(0.0) == 0.0,
           f"max abs err {err:.2e} on 200 points; g_hat(0) = {kernel_g_hat(0.0)}")


def test_04_electrostatic_limit():
    body = TestBody(radius_R=1.3, charge_density_rho_c=0.7)
    Q = 1e-3 * body.radius_R
    target = -body.force_scale * Q
    worst = 0.0
    for kappa in (2.0, 3.0, 5.0):
        force = average_self_force(BRStepTrajectory(Q, kappa * body.radius_R), body).force
        worst = max(worst, abs(force / target - 1.0))
    record(4, "step-limit force = -rho^2 V^2 Q / R^3 for k >= 2", worst <= 1e-10,
           f"max rel err {worst:.2e} at k in {{2, 3, 5}}")


def test_05_bounds():
    rng = np.random.default_rng(2024)
    body = TestBody(radius_R=1.0)
    checked = violations = 0
    worst = 0.0
    for tag in sorted(RAMP_SHAPES):
        for _ in range(20):
            kappa = rng.uniform(0.2, 5.0)
            frac = rng.uniform(0.001, 0.2)
            traj = Trajectory(1e-3, frac * kappa, kappa, tag)
            rep = decompose(traj, body)
            for dF in (rep.delta_F_initial, rep.delta_F_final):
                checked += 1
                r14 = abs(dF) / rep.bound_initial
                r15 = abs(dF / rep.F_bar_BR) / rep.bound_ratio
                worst = max(worst, r14, r15)
                violations += (r14 >= 1.0) + (r15 >= 1.0)
    record(5, "end-interval bounds hold", violations == 0,
           f"{violations} violations over {checked} intervals x 2 bounds; "
           f"max measured/bound {worst:.3f}")


@pytest.mark.parametrize("kappa", [0.5, 1.0, 3.0])
def test_06_convergence(kappa):
    body = TestBody(radius_R=1.0)
    devs, bounds = [], []
    for k in range(7):
        frac = 0.1 * 2.0**-k
        rep = decompose(Trajectory(1e-3 * 2.0**-k, frac * kappa, kappa), body)
        devs.append(abs(rep.ratio_F_to_BR - 1.0))
        bounds.append(rep.bound_ratio)
    within = all(d <= 2.0 * b for d, b in zip(devs, bounds))
    factors = [a / b for a, b in zip(devs, devs[1:])]
    linear = all(1.5 <= f <= 2.5 for f in factors)
    # each kappa is one parametrized case; the criterion line reports per kappa
    record(6, f"convergence to step limit (k={kappa:g})", within and linear,
           f"deviation/bound max {max(d / b for d, b in zip(devs, bounds)):.3f}; "
           f"halving factors {min(factors):.3f}..{max(factors):.3f}")


def test_07_radiation_reaction():
    kappa = np.linspace(0.05, 6.0, 100)
    err = float(np.max(np.abs(rr_force_hat_BR(kappa)
                              - 1.5 * (kappa * geometric_factor_A_hat(kappa) + 1.0))))
    beyond = np.linspace(2.0, 40.0, 50)
    zero_tail = bool(np.all(rr_force_hat_BR(beyond) == 0.0))
    spot = rr_force_hat_BR(1.0)
    limit = rr_force_hat_BR(1e-9)
    ok = err <= 1e-12 and zero_tail and spot == -0.9375 and abs(limit + 3.0) < 1e-8
    record(7, "radiation-reaction decomposition", ok,
           f"identity err {err:.2e}; zero for k>=2: {zero_tail}; "
           f"F_RR(1) = {spot}; F_RR(1e-9) = {limit:.10f}")


def test_08_no_neutralizing_body():
    body = TestBody(radius_R=1.0)
    worst = 0.0
    for kappa in (0.5, 1.0, 1.5):
        hat = no_neutralizing_body_force(BRStepTrajectory(1e-3, kappa), body).hat
        worst = max(worst, abs(hat - 2.0 / 3.0 * rr_force_hat_BR(kappa)))
    record(8, "no-neutralizing-body force = (2/3) F_RR", worst <= 1e-10,
           f"max abs err {worst:.2e} at k in {{0.5, 1, 1.5}}")


def test_09_uncertainty(tmp_path):
    grid = [0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0]
    curves = uncertainty_curves(grid, R=1.0, hbar=1.0)
    rr_zero = all(v == 0.0 for k, v in zip(grid, curves.delta_E_RR_only) if k >= 2)
    full4 = curves.delta_E_full[grid.index(4.0)]
    paths = [tmp_path / "first.csv", tmp_path / "second.csv"]
    codes = [cli.main(["uncertainty", "--grid", ",".join(map(str, grid)), "--out", str(p)])
             for p in paths]
    identical = codes == [0, 0] and paths[0].read_bytes() == paths[1].read_bytes()
    record(9, "uncertainty curves", rr_zero and full4 == 0.5 and identical,
           f"dE_rr_only(k>=2) == 0: {rr_zero}; dE_full(4) = {full4}; "
           f"CSV byte-identical: {identical}")


def test_10_grid_oracle_cross_validation():
    rng = np.random.default_rng(10)
    body = TestBody(radius_R=1.0)
    worst = 0.0
    for _ in range(10):
        kappa = rng.uniform(0.2, 5.0)
        traj = Trajectory(1e-3, rng.uniform(0.001, 0.2) * kappa, kappa,
                          rng.choice(sorted(RAMP_SHAPES)))
        ref = force_grid_oracle(traj, body)
        got = average_self_force(traj, body).force
        worst = max(worst, abs(got - ref) / abs(ref))
    record(10, "adaptive quadrature vs grid oracle", worst <= 1e-7,
           f"max rel disagreement {worst:.2e} over 10 configurations")
