"""Closed-form kernels on the unit interval and their partial derivatives.

Every kernel exposes ``__call__(x, y, dx=0, dy=0)`` which broadcasts over
numpy arrays and returns the mixed partial derivative
``d^dx/dx^dx d^dy/dy^dy K(x, y)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as npoly


class KernelNotImplementedError(NotImplementedError):
    """Requested kernel family (or parameter combination) is not available."""


class DerivativeOrderError(ValueError):
    """Requested derivative order exceeds what the kernel supports."""


def _check_orders(dx: int, dy: int, max_order: int, name: str) -> None:
    for order in (dx, dy):
        if order < 0 or order > max_order:
            raise DerivativeOrderError(
                f"{name} supports derivative orders 0..{max_order} per argument, got {order}"
            )


def matern_polynomial(m: int) -> np.ndarray:
    """Coefficients (ascending) of p with t^(m-1/2) K_{m-1/2}(t) = sqrt(pi/2) e^-t p(t)."""
    n = m - 1
    coef = np.zeros(m)
    for k in range(m):
        coef[n - k] = factorial(n + k) / (factorial(k) * factorial(n - k)) / 2.0**k
    return coef


@dataclass(frozen=True)
class MaternKernel:
    """Sobolev spline kernel K(x, y) = g_{m,theta}(x - y), the Green function of
    (theta^2 I - Delta)^m on the real line.

    For d = 1 the Bessel order m - 1/2 is a half-integer, so g reduces to
    ``C e^{-t} p(t)`` with ``t = theta |x - y|`` and p a polynomial of degree
    m - 1. For m = 3 this is ``e^{-t} (t^2 + 3t + 3) / (16 theta^5)``.

    Parameters
    ----------
    m : int
        Smoothness degree, ``m >= 2``.
    theta : float
        Shape parameter (inverse length scale), ``theta > 0``.
    d : int
        Spatial dimension. Only ``d = 1`` is implemented.
    """

    m: int = 3
    theta: float = 1.0
    d: int = 1
    _polys: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.d != 1:
            raise KernelNotImplementedError(
                f"kernel family not implemented: Matern with d={self.d} (only d=1)"
            )
        if int(self.m) != self.m or self.m < 2:
            raise KernelNotImplementedError(
                f"kernel family not implemented: Matern with m={self.m} (need integer m >= 2)"
            )
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        # q_{n+1} = q_n' - q_n gives d^n/dt^n [e^-t q_0(t)] = e^-t q_n(t)
        polys = [matern_polynomial(self.m)]
        for _ in range(2 * self.max_order):
            q = polys[-1]
            polys.append(npoly.polysub(npoly.polyder(q), q))
        object.__setattr__(self, "_polys", tuple(polys))

    @property
    def max_order(self) -> int:
        """Largest derivative order allowed per argument (kernel is C^{2m-2})."""
        return min(2, self.m - 1)

    @property
    def scale(self) -> float:
        return 2.0 ** (-self.m) / (factorial(self.m - 1) * self.theta ** (2 * self.m - 1))

    def radial(self, s, order: int = 0):
        """n-th derivative of g at signed offset s = x - y."""
        s = np.asarray(s, dtype=float)
        t = self.theta * np.abs(s)
        val = self.scale * self.theta**order * np.exp(-t) * npoly.polyval(t, self._polys[order])
        if order % 2:
            # odd derivatives are odd in s; q_n(0) = 0 there so the sign at s=0 is moot
            val = val * np.sign(s)
        return val

    def __call__(self, x, y, dx: int = 0, dy: int = 0):
        _check_orders(dx, dy, self.max_order, "MaternKernel")
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        val = self.radial(x - y, dx + dy)
        return -val if dy % 2 else val


@dataclass(frozen=True)
class BrownianBridgeKernel:
    """R^1(x, y) = min(x, y) - x y, the covariance of the Brownian bridge on (0, 1)."""

    max_order: int = 0

    def __call__(self, x, y, dx: int = 0, dy: int = 0):
        _check_orders(dx, dy, self.max_order, "BrownianBridgeKernel")
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.minimum(x, y) - x * y


def _r2_lower(x, y):
    # branch x <= y
    return -x**3 / 6 + x**3 * y / 6 + x * y**3 / 6 - x * y**2 / 2 + x * y / 3


@dataclass(frozen=True)
class IntegratedBridgeKernel:
    """R^2(x, y) = sum_k (k pi)^-4 phi_k(x) phi_k(y), in closed piecewise-cubic form."""

    max_order: int = 0

    def __call__(self, x, y, dx: int = 0, dy: int = 0):
        _check_orders(dx, dy, self.max_order, "IntegratedBridgeKernel")
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        lo = np.minimum(x, y)
        hi = np.maximum(x, y)
        return _r2_lower(lo, hi)


@dataclass(frozen=True)
class SpectralKernel:
    """Truncated Mercer series K(x, y) = sum_k lambda_k e_k(x) e_k(y).

    ``eigenvalues`` is a callable k -> lambda_k over k = 1..truncation and
    ``eigenfunction`` a callable (k, x) -> e_k(x), both numpy-vectorised.
    """

    eigenvalues: Callable
    eigenfunction: Callable
    truncation: int = 200

    def partial_sum(self, x, y, n_modes: int | None = None):
        if n_modes is None:
            n_modes = self.truncation
        if n_modes < 0 or n_modes > self.truncation:
            raise ValueError(f"n_modes={n_modes} outside 0..{self.truncation}")
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if n_modes == 0:
            return np.zeros(np.broadcast(x, y).shape)
        k = np.arange(1, n_modes + 1).reshape((-1,) + (1,) * np.broadcast(x, y).ndim)
        terms = self.eigenvalues(k) * self.eigenfunction(k, x) * self.eigenfunction(k, y)
        return terms.sum(axis=0)

    def __call__(self, x, y, dx: int = 0, dy: int = 0):
        _check_orders(dx, dy, 0, "SpectralKernel")
        return self.partial_sum(x, y)


def sine_mode(k, x):
    """phi_k(x) = sqrt(2) sin(k pi x), orthonormal on (0, 1)."""
    return np.sqrt(2.0) * np.sin(k * np.pi * x)


def bridge_spectral(roughness: int = 1, truncation: int = 200) -> SpectralKernel:
    """Series form of R^i: eigenvalues q_k^{2i} with q_k = 1/(k pi), sine eigenfunctions."""
    return SpectralKernel(
        eigenvalues=lambda k: (1.0 / (k * np.pi)) ** (2 * roughness),
        eigenfunction=sine_mode,
        truncation=truncation,
    )


def covariance_kernel(variant: str):
    """Return the closed-form spatial noise covariance ``"r1"`` or ``"r2"``."""
    variant = variant.lower()
    if variant == "r1":
        return BrownianBridgeKernel()
    if variant == "r2":
        return IntegratedBridgeKernel()
    raise KernelNotImplementedError(f"kernel family not implemented: covariance {variant!r}")


def gram(kernel, xs, ys=None) -> np.ndarray:
    """Dense matrix ``K(xs[i], ys[j])``."""
    xs = np.asarray(xs, dtype=float)
    ys = xs if ys is None else np.asarray(ys, dtype=float)
    return kernel(xs[:, None], ys[None, :])
