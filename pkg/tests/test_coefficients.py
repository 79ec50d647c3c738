import math

import numpy as np
import pytest
from scipy.integrate import quad

from fluctuon.coefficients import (
    linear_family,
    model_case,
    smooth_near_zero,
    theta_phi_q,
    validate_assumptions,
)


def test_quadratic_family_values():
    c = model_case(2.0)
    z = np.linspace(0.1, 5.0, 50)
    assert np.allclose(c.phi(z), z**2)
    assert np.allclose(c.dphi(z), 2 * z)
    assert np.allclose(c.sigma(z), z)
    assert np.allclose(c.dsigma(z), np.ones_like(z))
    assert c.m == 2.0
    assert c.p == 4.0
    assert c.k == 0.0
    assert c.g == 0.0
    assert c.theta == 0.25


def test_cubic_family_exponents():
    c = model_case(3.0)
    assert c.p == 9.0
    assert c.k == 0.5
    assert c.g == 1.0
    z = np.linspace(0.1, 3.0, 20)
    assert np.allclose(c.sigma(z), z**1.5)
    assert np.allclose(c.dsigma(z), 1.5 * z**0.5)


def test_m1_family_theta_boundary():
    c = model_case(1.0)
    assert c.theta < 0.5
    z = np.linspace(0.01, 4.0, 40)
    assert np.allclose(c.phi(z), z)
    assert np.allclose(c.sigma(z), np.sqrt(z))


def test_theta_phi_q_against_direct_quadrature():
    c = model_case(2.0)
    for q, z in [(2.0, 1.3), (4.0, 0.7)]:
        expected, _ = quad(lambda s: s ** ((q - 2) / 2) * math.sqrt(2 * s), 0.0, z)
        assert abs(theta_phi_q(c, q, z) - expected) <= 1e-8 * (1 + abs(expected))


def test_validate_quadratic_passes():
    report = validate_assumptions(model_case(2.0))
    assert report.all_passed, report.table()


def test_validate_linear_family_passes():
    report = validate_assumptions(linear_family())
    assert report.all_passed, report.table()


def test_validate_m1_flags_boundary():
    report = validate_assumptions(model_case(1.0))
    names = {r.name: r for r in report.results}
    flagged = [r for r in report.results if not r.passed]
    # the square-root noise case sits on an exponent boundary and must be reported
    assert flagged, names.keys()


def test_smoothing_preserves_away_from_delta():
    base = model_case(1.0)
    c = smooth_near_zero(base, 0.25, z_ref=1.0).coeffs
    z = np.linspace(0.3, 4.0, 64)
    assert np.allclose(c.sigma(z), base.sigma(z))
    assert np.allclose(c.phi(z), base.phi(z))


def test_smoothing_zero_at_origin_and_c1_glue():
    base = model_case(1.0)
    delta = 0.25
    c = smooth_near_zero(base, delta, z_ref=1.0).coeffs
    assert c.sigma(np.array([0.0]))[0] == 0.0
    eps = 1e-7
    lo = c.sigma(np.array([delta - eps]))[0]
    hi = c.sigma(np.array([delta + eps]))[0]
    assert abs(hi - lo) <= 1e-5
    dlo = c.dsigma(np.array([delta - eps]))[0]
    dhi = c.dsigma(np.array([delta + eps]))[0]
    assert abs(dhi - dlo) <= 1e-4


def test_smoothing_finite_derivative_at_origin():
    c = smooth_near_zero(model_case(1.0), 0.2, z_ref=1.0).coeffs
    d0 = c.dsigma(np.array([1e-12]))[0]
    assert np.isfinite(d0)
    assert d0 >= 0.0


def test_smoothed_diffusion_slope_bounded_below():
    c = smooth_near_zero(model_case(1.0), 0.2, z_ref=1.0).coeffs
    z = np.linspace(0.0, 2.0, 512)
    assert np.min(c.dphi(z)) >= 1.0 - 1e-12  # identity diffusion untouched


def test_derivative_consistency_finite_difference():
    c = model_case(2.0)
    z = np.linspace(0.2, 3.0, 30)
    h = 1e-6
    fd = (c.phi(z + h) - c.phi(z - h)) / (2 * h)
    assert np.max(np.abs(fd - c.dphi(z))) <= 1e-6 * np.max(np.abs(c.dphi(z)))
    fd2 = (c.sigma(z + h) - c.sigma(z - h)) / (2 * h)
    assert np.max(np.abs(fd2 - c.dsigma(z))) <= 1e-6


def test_smoothed_derivative_consistency():
    w = smooth_near_zero(model_case(1.0), 0.3, z_ref=1.0)
    c = w.coeffs
    z = np.linspace(0.01, 2.0, 200)
    z = z[np.abs(z - w.delta_eta) > 1e-3]
    h = 1e-7
    fd = (c.sigma(z + h) - c.sigma(z - h)) / (2 * h)
    assert np.max(np.abs(fd - c.dsigma(z))) <= 1e-4


def test_no_convection_by_default():
    c = model_case(2.0)
    assert not c.has_convection()
    z = np.linspace(0, 2, 10)
    assert np.all(c.nu(z) == 0)


def test_invalid_exponent():
    with pytest.raises(ValueError):
        model_case(0.0)
