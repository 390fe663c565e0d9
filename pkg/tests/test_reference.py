import numpy as np
import pytest
from scipy import integrate

from kernelspde.reference import (
    SpectralHeatSolution,
    discrete_mean,
    discrete_modal_variance,
    discrete_var,
    exact_mean,
    exact_var,
    initial_coefficients,
    relative_rmse,
    spectral_reference_path,
)
from kernelspde.spde import path_stream, u0_default


def test_initial_coefficients_of_default_u0():
    c = initial_coefficients(u0_default, 10)
    np.testing.assert_allclose(c, [1, 1, 1, 0, 0, 0, 0, 0, 0, 0], atol=1e-12)


def test_initial_coefficients_against_scipy_quad():
    f = lambda x: x * (1 - x)
    c = initial_coefficients(f, 5)
    ref = [integrate.quad(lambda x: f(x) * np.sqrt(2) * np.sin(k * np.pi * x), 0, 1)[0] for k in range(1, 6)]
    np.testing.assert_allclose(c, ref, atol=1e-12)


def test_mean_at_time_zero_is_u0():
    x = np.linspace(0, 1, 41)
    np.testing.assert_allclose(exact_mean(SpectralHeatSolution(), 0.0, x), u0_default(x), atol=1e-12)


def test_boundary_values_vanish():
    sol = SpectralHeatSolution(roughness=2)
    for t in (0.0, 0.1, 1.0):
        assert np.all(np.abs(exact_mean(sol, t, np.array([0.0, 1.0]))) < 1e-12)
        assert np.all(np.abs(exact_var(sol, t, np.array([0.0, 1.0]))) < 1e-20)


def test_variance_at_midpoint_closed_form():
    # only odd k contribute at x = 1/2 and sum_{odd} 1/(k pi)^4 = 1/96
    sol = SpectralHeatSolution(n_modes=2000, roughness=1)
    k = np.arange(1, 2001, 2)
    tiny = np.sum(np.exp(-2 * (k * np.pi) ** 2) / (k * np.pi) ** 4) * 96
    assert exact_var(sol, 1.0, 0.5) == pytest.approx((1 - tiny) / 96, rel=1e-9)


def test_variance_against_ou_monte_carlo():
    # exact OU transition: xi_t ~ N(0, a^2 (1 - e^{-2 lam t}) / (2 lam)) from zero start
    sol = SpectralHeatSolution(n_modes=30, roughness=1, sigma=1.5)
    t, x = 0.05, np.array([0.3, 0.5])
    lam, a = sol.rates, sol.noise_amplitudes
    std = a * np.sqrt(-np.expm1(-2 * lam * t) / (2 * lam))
    rng = np.random.default_rng(5)
    xi = rng.standard_normal((100_000, 30)) * std
    field = xi @ sol.modes(x)
    v = field.var(axis=0)
    exact = exact_var(sol, t, x)
    se = exact * np.sqrt(2 / len(field))
    assert np.all(np.abs(v - exact) <= 5 * se)


def test_broadcast_shapes():
    sol = SpectralHeatSolution()
    t = np.linspace(0.01, 1, 7)[:, None]
    x = np.linspace(0, 1, 5)[None, :]
    assert exact_mean(sol, t, x).shape == (7, 5)
    assert exact_var(sol, t, x).shape == (7, 5)


def test_truncation_robustness():
    x = np.linspace(0, 1, 21)
    for t in (0.01, 0.5, 1.0):
        a, b = SpectralHeatSolution(200), SpectralHeatSolution(400)
        assert np.max(np.abs(exact_mean(a, t, x) - exact_mean(b, t, x))) <= 1e-10
        a2, b2 = SpectralHeatSolution(200, roughness=2), SpectralHeatSolution(400, roughness=2)
        assert np.max(np.abs(exact_var(a2, t, x) - exact_var(b2, t, x))) <= 1e-10
        # rough noise: the omitted tail is bounded by sum_{k>200} 1/(k pi)^4
        a1, b1 = SpectralHeatSolution(200, roughness=1), SpectralHeatSolution(400, roughness=1)
        tail = 1 / (3 * 200**3 * np.pi**4)
        assert np.max(np.abs(exact_var(a1, t, x) - exact_var(b1, t, x))) <= tail


def test_discrete_mean_approaches_exact():
    sol = SpectralHeatSolution()
    x = np.linspace(0, 1, 11)
    errs = [np.max(np.abs(discrete_mean(sol, n, x)[-1] - exact_mean(sol, 1.0, x))) for n in (100, 200, 400)]
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios > 1.8) & (ratios < 2.2))


def test_discrete_variance_recursion_limit():
    sol = SpectralHeatSolution(n_modes=5)
    v = discrete_modal_variance(sol, 10)
    dt = 0.1
    damp = 1 + dt * sol.rates
    kick = sol.noise_amplitudes**2 * dt
    np.testing.assert_allclose(v[0], kick / damp**2)
    np.testing.assert_allclose(v[1], (v[0] + kick) / damp**2)
    assert discrete_var(sol, 10, np.array([0.2, 0.5])).shape == (10, 2)


def test_reference_path_zero_noise_is_discrete_mean():
    sol = SpectralHeatSolution(sigma=0.0)
    x = np.linspace(0, 1, 9)
    path = spectral_reference_path(sol, 50, path_stream(0, 0), x)
    np.testing.assert_allclose(path, discrete_mean(sol, 50, x), atol=1e-13)


def test_reference_path_one_mode_by_hand():
    sol = SpectralHeatSolution(n_modes=1, sigma=2.0, coefficients=[0.5])
    z = path_stream(4, 0).standard_normal(1)[0]
    dt = 0.25
    xi = (0.5 + 2.0 / np.pi * np.sqrt(dt) * z) / (1 + dt * np.pi**2)
    path = spectral_reference_path(sol, 4, path_stream(4, 0), [0.5])
    assert path[0, 0] == pytest.approx(xi * np.sqrt(2))


def test_reference_path_ensemble_statistics():
    sol = SpectralHeatSolution(n_modes=40, roughness=1)
    x = np.array([0.25, 0.5])
    paths = np.stack([spectral_reference_path(sol, 20, path_stream(1, i), x)[-1] for i in range(4000)])
    mean_ref = discrete_mean(sol, 20, x)[-1]
    var_ref = discrete_var(sol, 20, x)[-1]
    assert np.all(np.abs(paths.mean(axis=0) - mean_ref) <= 5 * np.sqrt(var_ref / len(paths)))
    assert np.all(np.abs(paths.var(axis=0) - var_ref) <= 5 * var_ref * np.sqrt(2 / len(paths)))


def test_reference_path_rejects_zero_steps():
    with pytest.raises(ValueError):
        spectral_reference_path(SpectralHeatSolution(), 0, path_stream(0, 0), [0.5])


def test_relative_rmse_cases():
    exact = np.array([[1.0, -2.0], [0.5, 0.25]])
    assert relative_rmse(exact, exact) == 0.0
    # constant offset c per row relative to the row sup
    shifted = exact + np.array([[0.2], [0.05]])
    assert relative_rmse(exact, shifted) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        relative_rmse(exact, exact[:, :1])
    with pytest.raises(ValueError):
        relative_rmse(np.array([[0.0, 0.0], [1.0, 1.0]]), np.ones((2, 2)))
