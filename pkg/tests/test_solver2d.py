import logging

import numpy as np
import pytest

from wgnls.errors import GeometryUnavailable, MassDriftExceeded, NonFiniteState, StepRejected, ValidationError
from wgnls.geometry import build_coefficients, circle, reconstruct_curve
from wgnls.solver2d import (
    ROUGH_H1,
    TENSOR_PLUS_EXCITED,
    TENSOR_SMOOTH,
    Strip2DProblem,
    dt_resolving,
    energy_2d,
    exact_linear_flow,
    initial_data,
    initial_theta,
    mass_2d,
    reconstruct_physical,
    rhs_bounded,
    rough_profile,
    run2d,
    step_if_rk4,
)
from wgnls.spectral import StripGrid, l2_norm, random_field

from conftest import circle_coeffs, flat_coeffs


def test_t_end_zero():
    c = circle_coeffs(32, 8, 0.1)
    phi0 = initial_data(TENSOR_SMOOTH, c.grid, 0.1)
    res = run2d(Strip2DProblem(c, 1.0, phi0, 1e-3, 0.0, [0.0]))
    np.testing.assert_array_equal(res.snapshots[0], phi0)
    np.testing.assert_array_equal(step_if_rk4(phi0, 0.0, c, 1.0), phi0)


def test_rhs_vanishes_flat_linear(rng):
    c = flat_coeffs(32, 8, 0.1)
    np.testing.assert_allclose(rhs_bounded(random_field(c.grid, rng), c, 0.0), 0, atol=1e-12)


def test_flat_linear_matches_exact_flow(rng):
    c = flat_coeffs(32, 8, 0.1)
    phi0 = random_field(c.grid, rng, s=2.0)
    res = run2d(Strip2DProblem(c, 0.0, phi0, 0.05, 1.0))
    exact = exact_linear_flow(phi0, c.grid, 0.1, 1.0)
    assert l2_norm(res.snapshots[-1] - exact, c.grid) < 1e-11


def test_energy_of_ground_mode_is_zero():
    c = flat_coeffs(32, 8, 0.1)
    e1 = np.outer(np.ones(32), c.grid.basis.mode(1)).astype(complex)
    assert energy_2d(e1, c, 0.0) == pytest.approx(0, abs=1e-12)
    assert energy_2d(e1, c, 1.0) == pytest.approx(0.25 * 2 * np.pi * 0.75, rel=1e-12)
    assert mass_2d(e1, c.grid) == pytest.approx(2 * np.pi, rel=1e-14)


def test_mass_drift_guard():
    c = circle_coeffs(32, 8, 0.1)
    phi0 = initial_data(TENSOR_SMOOTH, c.grid, 0.1)
    with pytest.raises(MassDriftExceeded):
        run2d(Strip2DProblem(c, 1.0, phi0, 2e-3, 0.2, mass_drift_bound=1e-15))


def test_dt_clamped_to_stability(caplog):
    c = circle_coeffs(32, 8, 0.1)
    phi0 = initial_data(TENSOR_SMOOTH, c.grid, 0.1)
    with caplog.at_level(logging.WARNING):
        res = run2d(Strip2DProblem(c, 1.0, phi0, 10.0, 0.01, [0.0, 0.01], mass_drift_bound=1.0))
    assert res.dt < 10.0
    assert "stability" in caplog.text


def test_non_finite_state_rejected():
    c = circle_coeffs(32, 8, 0.1)
    phi0 = initial_data(TENSOR_SMOOTH, c.grid, 0.1)
    phi0[3, 2] = np.nan
    with pytest.raises(NonFiniteState):
        run2d(Strip2DProblem(c, 1.0, phi0, 1e-3, 0.01))
    with pytest.raises(StepRejected) as exc:
        run2d(Strip2DProblem(c, 1.0, phi0, 1e-3, 0.01, [0.01]))
    assert exc.value.time == 0.0


def test_problem_validation():
    c = circle_coeffs(32, 8, 0.1)
    with pytest.raises(ValidationError):
        Strip2DProblem(c, 1.0, np.zeros((32, 4)), 1e-3, 1.0)
    with pytest.raises(ValidationError):
        Strip2DProblem(c, 1.0, np.zeros((32, 8)), -1.0, 1.0)
    with pytest.raises(ValidationError):
        Strip2DProblem(c, 1.0, np.zeros((32, 8)), 1e-3, 1.0, [0.0, 2.0])


def test_data_families():
    g = StripGrid(64, 8)
    e1 = g.basis.mode(1)
    for fam in (TENSOR_SMOOTH, ROUGH_H1):
        phi = initial_data(fam, g, 0.1)
        np.testing.assert_allclose(phi, np.outer(initial_theta(phi, g), e1), atol=1e-13)
    phi = initial_data(TENSOR_PLUS_EXCITED, g, 0.1)
    c = g.basis.forward(phi)
    np.testing.assert_allclose(c[:, 1], 0.01 * np.cos(g.x1), atol=1e-14)
    with pytest.raises(ValidationError):
        initial_data("nope", g, 0.1)
    with pytest.raises(ValidationError):
        rough_profile(g, 0.1, s=2.0)


def test_rough_cutoff_grows():
    g = StripGrid(128, 8)
    for eps, K in ((0.2, 2), (0.05, 4), (0.01, 10)):
        th = rough_profile(g, eps)
        spec = np.abs(np.fft.fft(th)) / 128
        active = np.abs(g.k)[spec > 1e-12]
        assert active.max() == K


def test_dt_resolving_formula():
    c = circle_coeffs(32, 8, 0.1)
    assert dt_resolving(c) == pytest.approx(0.01 / (2 * np.pi**2), rel=1e-12)


def test_reconstruction_preserves_mass(rng):
    c = circle_coeffs(64, 8, 0.1)
    phi = random_field(c.grid, rng)
    s = reconstruct_physical(phi, c, circle(), t=0.3)
    assert s.l2_norm() == pytest.approx(l2_norm(phi, c.grid), rel=1e-12)
    assert s.rows().shape == (64 * 8, 5)
    theta = phi[:, 0]
    s1 = reconstruct_physical(theta, c, circle())
    assert s1.psi.shape == (64, 8)
    with pytest.raises(GeometryUnavailable):
        reconstruct_physical(phi, c, circle(), embedding=reconstruct_curve(circle(), 32))


def test_reconstruction_points_on_tube():
    c = circle_coeffs(32, 8, 0.2)
    s = reconstruct_physical(np.ones((32, 8)), c, circle())
    r = np.hypot(s.x, s.y - 1.0)
    np.testing.assert_allclose(r, 1 - 0.2 * c.grid.x2[None, :] * np.ones((32, 1)), atol=1e-12)
