import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from selfforce_lab.kernels import (
    DomainError,
    KernelPoint,
    MeasurementWindow,
    TestBody,
    electrostatic_limit_force,
    geometric_factor_A_hat,
    kernel_f_hat,
    kernel_g_hat,
    rr_force_hat_BR,
)
from selfforce_lab.quadrature import QuadratureSpec, integrate


# Exact rational evaluation of the closed forms, used as the reference.
def f_exact(chi):
    chi = Fraction(chi)
    theta = 1 if chi <= 2 else 0
    return Fraction(1, 2) * (chi - 2) * (2 - 2 * chi - chi**2) * theta - 1


def A_exact(kappa):
    kappa = Fraction(kappa)
    theta = 1 if kappa <= 2 else 0
    return -(4 + kappa) * (2 - kappa) ** 2 * theta / (8 * kappa) - 1 / kappa


@pytest.mark.parametrize("chi, expected", [(0, -3.0), (2, -1.0), (1, -0.5)])
def test_f_hat_examples(chi, expected):
    assert kernel_f_hat(chi) == expected
    assert float(f_exact(chi)) == expected


@pytest.mark.parametrize("xi, expected", [(0, 0.0), (2, -1.0), (1, -1.25)])
def test_g_hat_examples(xi, expected):
    assert kernel_g_hat(xi) == expected
    assert float(-f_exact(xi) / 2 - Fraction(3, 2)) == expected


@pytest.mark.parametrize("kappa, expected", [(2, -0.5), (1, -1.625), (4, -0.25)])
def test_A_hat_examples(kappa, expected):
    assert geometric_factor_A_hat(kappa) == expected
    assert float(A_exact(kappa)) == expected


def test_A_hat_kappa_one_by_quadrature():
    value, _ = integrate(kernel_f_hat, 0.0, 1.0)
    assert value == pytest.approx(-1.625, rel=1e-12)


@pytest.mark.parametrize("kappa, expected", [(2, 0.0), (1, -0.9375)])
def test_rr_force_examples(kappa, expected):
    assert rr_force_hat_BR(kappa) == expected


def test_rr_force_small_kappa_limit():
    assert rr_force_hat_BR(1e-12) == pytest.approx(-3.0, abs=1e-10)
    k = 1e-6
    assert 1.5 * (k * geometric_factor_A_hat(k) + 1) == pytest.approx(-3.0, abs=1e-5)


def test_rr_force_is_positive_zero_beyond_two():
    for k in (2.0, 2.5, 7.0):
        v = rr_force_hat_BR(k)
        assert v == 0.0 and math.copysign(1.0, v) == 1.0


def test_vectorized_matches_scalar():
    grid = np.linspace(0.0, 4.0, 17)
    np.testing.assert_array_equal(kernel_f_hat(grid), [kernel_f_hat(c) for c in grid])
    assert isinstance(kernel_f_hat(1.0), float)


@pytest.mark.parametrize("fn", [kernel_f_hat, kernel_g_hat])
@pytest.mark.parametrize("bad", [-1e-9, math.nan, math.inf])
def test_kernel_domain_errors(fn, bad):
    with pytest.raises(DomainError):
        fn(bad)


@pytest.mark.parametrize("fn", [geometric_factor_A_hat, rr_force_hat_BR])
@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan])
def test_kappa_domain_errors(fn, bad):
    with pytest.raises(DomainError):
        fn(bad)


def test_tiny_kappa_is_legal():
    assert geometric_factor_A_hat(1e-8) == pytest.approx(-3e8, rel=1e-6)


@pytest.mark.parametrize("fn", [kernel_f_hat, kernel_g_hat, geometric_factor_A_hat, rr_force_hat_BR])
def test_continuity_at_breakpoint(fn):
    left = fn(np.nextafter(2.0, 0.0))
    right = fn(np.nextafter(2.0, 3.0))
    assert abs(left - right) < 1e-12
    assert abs(fn(2.0) - right) < 1e-12


def test_g_f_relation_random_points():
    xi = np.random.default_rng(1).uniform(0.0, 5.0, 200)
    diff = kernel_g_hat(xi) - (-0.5 * kernel_f_hat(xi) - 1.5)
    assert np.max(np.abs(diff)) <= 1e-14


@given(st.floats(min_value=0.0, max_value=50.0))
def test_g_f_relation_property(xi):
    assert abs(kernel_g_hat(xi) - (-0.5 * kernel_f_hat(xi) - 1.5)) <= 1e-14 * max(1.0, xi**3)


def test_max_abs_f_is_three_at_origin():
    chi = np.linspace(0.0, 4.0, 400_001)
    vals = np.abs(kernel_f_hat(chi))
    assert vals.max() == 3.0
    assert chi[np.argmax(vals)] == 0.0
    assert kernel_f_hat(1e6) == -1.0


@pytest.mark.parametrize("kappa", [0.25, 0.5, 1, 1.5, 2, 3, 5])
def test_A_hat_integral_identity(kappa):
    bps = (2.0,) if kappa > 2 else ()
    value, _ = integrate(kernel_f_hat, 0.0, kappa, QuadratureSpec(breakpoints=bps))
    assert value / kappa**2 == pytest.approx(geometric_factor_A_hat(kappa), rel=1e-10)


def test_rr_decomposition_identity():
    kappa = np.random.default_rng(2).uniform(1e-3, 5.0, 100)
    lhs = rr_force_hat_BR(kappa)
    rhs = 1.5 * (kappa * geometric_factor_A_hat(kappa) + 1.0)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


@pytest.mark.parametrize("kappa", [2.0, 2.5, 3.0, 7.25])
def test_f_integral_beyond_two(kappa):
    value, _ = integrate(kernel_f_hat, 0.0, kappa,
                         QuadratureSpec(breakpoints=(2.0,) if kappa > 2 else ()))
    assert abs(value + kappa) <= 1e-10


@given(st.floats(min_value=2.0, max_value=1e6))
def test_A_hat_beyond_two_is_minus_inverse(kappa):
    assert geometric_factor_A_hat(kappa) == -1.0 / kappa


def test_test_body_volume():
    body = TestBody(2.5, 3.0)
    assert body.volume_V == pytest.approx(4.0 / 3.0 * math.pi * 2.5**3, rel=1e-15)
    assert body.force_scale == pytest.approx(9.0 * body.volume_V**2 / 2.5**3, rel=1e-15)
    with pytest.raises(DomainError):
        TestBody(0.0)
    with pytest.raises(DomainError):
        TestBody(-1.0)


def test_measurement_window():
    body = TestBody(2.0)
    w = MeasurementWindow.from_kappa(1.5, body)
    assert w.tau == 3.0 and w.kappa * body.radius_R == w.tau
    assert MeasurementWindow.from_tau(3.0, body) == w
    with pytest.raises(DomainError):
        MeasurementWindow(tau=0.0, kappa=1.0)


def test_kernel_point_rejects_negative_argument():
    assert KernelPoint(0.0, -3.0).value == -3.0
    with pytest.raises(DomainError):
        KernelPoint(-0.5, 0.0)


def test_electrostatic_limit_examples(unit_body):
    assert electrostatic_limit_force(unit_body, 0.0) == 0.0
    assert electrostatic_limit_force(unit_body, 0.01) == pytest.approx(-(4 * math.pi / 3) ** 2 * 0.01)
    assert electrostatic_limit_force(unit_body, 0.01) == pytest.approx(-0.17546, abs=5e-6)


def test_electrostatic_limit_equals_step_limit_beyond_two(unit_body):
    kappa, Q = 3.0, 0.01
    step = unit_body.force_scale * Q * kappa * geometric_factor_A_hat(kappa)
    assert step == pytest.approx(electrostatic_limit_force(unit_body, Q), rel=1e-15)


def test_electrostatic_limit_linear_and_warns(odd_body):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        a = electrostatic_limit_force(odd_body, 0.01)
    assert electrostatic_limit_force(odd_body, 0.03) == pytest.approx(3 * a, rel=1e-14)
    with pytest.warns(RuntimeWarning, match="not small"):
        electrostatic_limit_force(odd_body, 0.5 * odd_body.radius_R)
