"""Sine-series reference for the stochastic heat equation on (0, 1).

With ``phi_k = sqrt(2) sin(k pi x)``, ``q_k = 1 / (k pi)`` and noise
``W = sum_k W^k q_k^i phi_k`` every mode is an Ornstein-Uhlenbeck process

    d xi^k = -k^2 pi^2 xi^k dt + sigma q_k^i dW^k,

so the mean and variance of ``U_t(x) = sum_k xi^k_t phi_k(x)`` are explicit
series. Note the per-mode noise amplitude is ``sigma q_k^i``; the variance
weight is therefore ``sigma^2 q_k^{2i} / (2 k^2 pi^2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .kernels import sine_mode


def initial_coefficients(u0: Callable, n_modes: int, panels: int = 64, nodes: int = 10) -> np.ndarray:
    """``int_0^1 u0(x) phi_k(x) dx`` for k = 1..n_modes by Gauss-Legendre quadrature."""
    t, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)[:, None]
    z = (edges[:-1, None] + half * (t + 1)).ravel()
    wz = (half * w).ravel()
    k = np.arange(1, n_modes + 1)[:, None]
    return (sine_mode(k, z[None, :]) * (wz * u0(z))[None, :]).sum(axis=1)


def _default_coefficients(n_modes: int) -> np.ndarray:
    c = np.zeros(n_modes)
    c[:3] = 1.0
    return c


@dataclass
class SpectralHeatSolution:
    n_modes: int = 200
    roughness: int = 1
    sigma: float = 1.0
    coefficients: np.ndarray = None
    _k: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.coefficients is None:
            self.coefficients = _default_coefficients(self.n_modes)
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if len(self.coefficients) < self.n_modes:
            self.coefficients = np.pad(self.coefficients, (0, self.n_modes - len(self.coefficients)))
        self.coefficients = self.coefficients[: self.n_modes]
        self._k = np.arange(1, self.n_modes + 1, dtype=float)

    @property
    def rates(self) -> np.ndarray:
        """k^2 pi^2."""
        return (self._k * np.pi) ** 2

    @property
    def noise_amplitudes(self) -> np.ndarray:
        """sigma q_k^i."""
        return self.sigma * (1.0 / (self._k * np.pi)) ** self.roughness

    def modes(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return sine_mode(self._k.reshape((-1,) + (1,) * x.ndim), x)


def exact_mean(sol: SpectralHeatSolution, t, x):
    """``E U_t(x) = sum_k xi_0^k e^{-k^2 pi^2 t} phi_k(x)``, broadcasting over t and x."""
    t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    shape = (-1,) + (1,) * t.ndim
    decay = np.exp(-sol.rates.reshape(shape) * t)
    return np.sum(sol.coefficients.reshape(shape) * decay * sol.modes(x), axis=0)


def exact_var(sol: SpectralHeatSolution, t, x):
    """``Var U_t(x) = sum_k sigma^2 q_k^{2i} (1 - e^{-2 k^2 pi^2 t}) phi_k(x)^2 / (2 k^2 pi^2)``."""
    t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    shape = (-1,) + (1,) * t.ndim
    lam = sol.rates.reshape(shape)
    weight = sol.noise_amplitudes.reshape(shape) ** 2 / (2 * lam)
    return np.sum(weight * -np.expm1(-2 * lam * t) * sol.modes(x) ** 2, axis=0)


def discrete_modal_variance(sol: SpectralHeatSolution, n_steps: int, T: float = 1.0) -> np.ndarray:
    """Per-mode variance of the implicit-Euler recursion, shape (n_steps, n_modes).

    ``V_j = (V_{j-1} + sigma^2 q_k^{2i} dt) / (1 + dt k^2 pi^2)^2`` with ``V_0 = 0``.
    """
    dt = T / n_steps
    damp = 1.0 + dt * sol.rates
    kick = sol.noise_amplitudes**2 * dt
    out = np.empty((n_steps, sol.n_modes))
    v = np.zeros(sol.n_modes)
    for j in range(n_steps):
        v = (v + kick) / damp**2
        out[j] = v
    return out


def discrete_var(sol: SpectralHeatSolution, n_steps: int, x, T: float = 1.0) -> np.ndarray:
    """Variance of the implicit-Euler modal scheme at t_1..t_n and points x."""
    v = discrete_modal_variance(sol, n_steps, T)
    return v @ (sol.modes(x) ** 2)


def discrete_mean(sol: SpectralHeatSolution, n_steps: int, x, T: float = 1.0) -> np.ndarray:
    """Mean of the implicit-Euler modal scheme: ``(1 + dt k^2 pi^2)^{-j} xi_0^k``."""
    dt = T / n_steps
    j = np.arange(1, n_steps + 1)[:, None]
    coef = sol.coefficients[None, :] * (1.0 + dt * sol.rates)[None, :] ** (-j)
    return coef @ sol.modes(x)


def spectral_reference_path(sol: SpectralHeatSolution, n_steps: int, stream: np.random.Generator,
                            x, T: float = 1.0) -> np.ndarray:
    """Implicit-Euler modal path ``xi_j = (xi_{j-1} + sigma q_k^i dW_j) / (1 + dt k^2 pi^2)``.

    Returns the field on ``x`` at t_1..t_n, shape (n_steps, len(x)).
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    dt = T / n_steps
    damp = 1.0 + dt * sol.rates
    amp = sol.noise_amplitudes * np.sqrt(dt)
    xi = sol.coefficients.copy()
    modal = np.empty((n_steps, sol.n_modes))
    for j in range(n_steps):
        xi = (xi + amp * stream.standard_normal(sol.n_modes)) / damp
        modal[j] = xi
    return modal @ sol.modes(np.asarray(x, dtype=float))


def relative_rmse(exact, approx) -> float:
    """``sqrt(mean_{j,k} (U - U^)^2 / ||U(t_j, .)||_inf^2)`` over an (n, N) trajectory."""
    exact = np.asarray(exact, dtype=float)
    approx = np.asarray(approx, dtype=float)
    if exact.shape != approx.shape or exact.ndim != 2:
        raise ValueError(f"shape mismatch: {exact.shape} vs {approx.shape}")
    sup = np.max(np.abs(exact), axis=1)
    if np.any(sup == 0):
        raise ValueError("exact trajectory has a row with zero sup-norm")
    return float(np.sqrt(np.mean(((exact - approx) / sup[:, None]) ** 2)))
