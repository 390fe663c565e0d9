"""Kernel-based collocation on the unit interval.

The collocation system stacks the interior functionals ``f -> (P f)(x_j)``
and the boundary functionals ``f -> (B f)(x_{N+k})``; its matrix has the
block form

    [ P1 P2 K*   P1 B2 K* ]
    [ B1 P2 K*   B1 B2 K* ]

and the estimator is ``u(x) = k_PB(x)^T K*_PB^{-1} y`` with
``k_PB(x) = (P2 K*(x, x_j), B2 K*(x, x_{N+k}))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as sla
from scipy.special import erfc

from .integral import Functionals, IntegralKernelEvaluator
from .kernels import gram as kernel_gram
from .operators import IDENTITY, DifferentialOperator

PINV_CUTOFF = 1e-12
SIGMA2_CLAMP = 1e-10
FILL_GRID = 10_001


class AssemblyError(ArithmeticError):
    pass


class FactorizationError(ArithmeticError):
    pass


class SingularGramError(np.linalg.LinAlgError):
    pass


class NumericalConsistencyError(ArithmeticError):
    pass


def fill_distance(points, n_candidates: int = FILL_GRID) -> float:
    """sup over a dense grid on [0, 1] of the distance to the nearest point."""
    pts = np.sort(np.asarray(points, dtype=float))
    grid = np.linspace(0.0, 1.0, n_candidates)
    idx = np.clip(np.searchsorted(pts, grid), 1, len(pts) - 1) if len(pts) > 1 else None
    if idx is None:
        return float(np.max(np.abs(grid - pts[0])))
    dist = np.minimum(np.abs(grid - pts[idx - 1]), np.abs(grid - pts[idx]))
    return float(dist.max())


@dataclass(frozen=True)
class CollocationSet:
    interior: np.ndarray
    boundary: np.ndarray
    fill_distance: float

    @classmethod
    def from_points(cls, interior, boundary=(0.0, 1.0)) -> "CollocationSet":
        interior = np.asarray(interior, dtype=float)
        boundary = np.asarray(boundary, dtype=float)
        if np.any((interior <= 0) | (interior >= 1)):
            raise ValueError("interior points must lie strictly inside (0, 1)")
        if not np.all(np.isin(boundary, (0.0, 1.0))):
            raise ValueError("boundary points must be 0 or 1")
        allpts = np.concatenate([interior, boundary])
        if len(np.unique(allpts)) != len(allpts):
            raise ValueError("collocation points must be pairwise distinct")
        return cls(interior, boundary, fill_distance(allpts))

    @property
    def N(self) -> int:
        return len(self.interior)

    @property
    def M(self) -> int:
        return len(self.boundary)

    @property
    def points(self) -> np.ndarray:
        return np.concatenate([self.interior, self.boundary])


def uniform_collocation(n_interior: int) -> CollocationSet:
    """Interior points ``j / (n + 1)`` for j = 1..n and boundary {0, 1}."""
    if n_interior < 1:
        raise ValueError(f"n_interior must be >= 1, got {n_interior}")
    interior = np.arange(1, n_interior + 1) / (n_interior + 1)
    return CollocationSet.from_points(interior)


@dataclass
class CollocationSystem:
    points: CollocationSet
    P: DifferentialOperator
    B: DifferentialOperator
    evaluator: IntegralKernelEvaluator
    matrix: np.ndarray
    cholesky: tuple | None = None
    pinv: np.ndarray | None = None

    @property
    def functionals(self) -> list[Functionals]:
        return [Functionals(self.P, self.points.interior), Functionals(self.B, self.points.boundary)]

    @property
    def factorized(self) -> bool:
        return self.cholesky is not None or self.pinv is not None

    def solve(self, rhs) -> np.ndarray:
        """``K*_PB^{-1} rhs`` (pseudo-inverse if the matrix was singular)."""
        rhs = np.asarray(rhs, dtype=float)
        if self.cholesky is not None:
            return sla.cho_solve(self.cholesky, rhs)
        if self.pinv is not None:
            return self.pinv @ rhs
        raise FactorizationError("collocation system has no factorization")

    def basis(self, x, op: DifferentialOperator = IDENTITY) -> np.ndarray:
        """Rows ``(op applied to) k_PB(x)`` for each x, shape (len(x), N + M)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return self.evaluator.gram([Functionals(op, x)], self.functionals)

    def power_function(self, x, method: str = "projection") -> np.ndarray:
        return power_function(self, x, method=method)


def assemble(points: CollocationSet, P: DifferentialOperator, B: DifferentialOperator,
             evaluator: IntegralKernelEvaluator) -> CollocationSystem:
    """Fill K*_PB and factor it (Cholesky, else spectral pseudo-inverse)."""
    system = CollocationSystem(points, P, B, evaluator, matrix=np.zeros((0, 0)))
    mat = evaluator.gram(system.functionals, cache=True)
    bad = np.argwhere(~np.isfinite(mat))
    if bad.size:
        j, k = bad[0]
        pts = points.points
        raise AssemblyError(f"non-finite K*_PB entry at ({j}, {k}), points ({pts[j]}, {pts[k]})")
    system.matrix = mat
    try:
        system.cholesky = sla.cho_factor(mat, lower=True)
    except np.linalg.LinAlgError:
        w, v = np.linalg.eigh(mat)
        keep = w > PINV_CUTOFF * w.max()
        system.pinv = (v[:, keep] / w[keep]) @ v[:, keep].T
    return system


@dataclass
class Estimator:
    """``u(x) = sum_k c_k (k_PB(x))_k`` for a fixed coefficient vector."""

    system: CollocationSystem
    coefficients: np.ndarray
    data: np.ndarray

    def __call__(self, x) -> np.ndarray:
        return self.system.basis(x) @ self.coefficients

    def apply(self, op: DifferentialOperator, x) -> np.ndarray:
        """``(op u)(x)``, differentiating the basis functions analytically."""
        return self.system.basis(x, op) @ self.coefficients

    def collocation_values(self) -> np.ndarray:
        """``(P u(x_j), B u(x_{N+k}))``; equals the data up to solver error."""
        pts = self.system.points
        return np.concatenate([self.apply(self.system.P, pts.interior),
                               self.apply(self.system.B, pts.boundary)])

    def residual(self) -> float:
        return float(np.max(np.abs(self.collocation_values() - self.data)))


def solve_with_data(system: CollocationSystem, y) -> Estimator:
    y = np.asarray(y, dtype=float)
    if not system.factorized:
        raise FactorizationError("collocation system has no factorization")
    return Estimator(system, system.solve(y), y)


def solve_elliptic(system: CollocationSystem, f: Callable, g: Callable) -> Estimator:
    """Collocation solution of ``P u = f`` in (0, 1), ``B u = g`` on {0, 1}."""
    pts = system.points
    y0 = np.concatenate([np.broadcast_to(f(pts.interior), (pts.N,)),
                         np.broadcast_to(g(pts.boundary), (pts.M,))]).astype(float)
    return solve_with_data(system, y0)


def power_function(system: CollocationSystem, x, method: str = "projection") -> np.ndarray:
    """Conditional standard deviation sigma(x) of the field given the collocation data.

    ``sigma(x)^2 = K*(x, x) - k_PB(x)^T K*_PB^{-1} k_PB(x)``.

    ``method="schur"`` evaluates that expression directly. The default
    ``"projection"`` uses ``K* = F^T F`` with F the weighted quadrature
    features: sigma(x) is the distance from F e_x to the span of the
    collocation features, computed by QR without cancellation.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if method == "schur":
        kx = system.basis(x)
        diag = np.array([system.evaluator.kstar(t, t) for t in x])
        sig2 = diag - np.einsum("ij,ji->i", kx, system.solve(kx.T))
        scale = diag
    elif method == "projection":
        ev = system.evaluator
        sig2 = np.empty(len(x))
        scale = np.empty(len(x))
        for s in range(0, len(x), 64):
            chunk = x[s:s + 64]
            nodes, weights = ev.rule.nodes_weights(ev.breakpoints(system.functionals, Functionals(IDENTITY, chunk)))
            basis = ev.features(system.functionals, nodes, weights)
            target = ev.features(Functionals(IDENTITY, chunk), nodes, weights)
            q, _ = np.linalg.qr(basis)
            resid = target - q @ (q.T @ target)
            sig2[s:s + 64] = np.sum(resid**2, axis=0)
            scale[s:s + 64] = np.sum(target**2, axis=0)
    else:
        raise ValueError(f"unknown method {method!r}")
    if np.any(sig2 < -SIGMA2_CLAMP * scale):
        raise NumericalConsistencyError(f"negative conditional variance {sig2.min():.3e}")
    return np.sqrt(np.clip(sig2, 0.0, None))


def error_probability(system: CollocationSystem, x, epsilon: float) -> np.ndarray:
    """``P(|S_x - u(x)| >= eps | data) = erfc(eps / (sqrt(2) sigma(x)))``; 0 where sigma = 0."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    sig = power_function(system, x)
    with np.errstate(divide="ignore"):
        out = np.where(sig > 0, erfc(epsilon / (np.sqrt(2.0) * np.where(sig > 0, sig, 1.0))), 0.0)
    return out


@dataclass
class KernelInterpolant:
    """Minimum-norm interpolant ``sum_k c_k K(x, x_k)``."""

    kernel: object
    points: np.ndarray
    coefficients: np.ndarray

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return kernel_gram(self.kernel, x, self.points) @ self.coefficients


def min_norm_interpolant(points, values, kernel) -> KernelInterpolant:
    points = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(np.unique(points)) != len(points):
        raise SingularGramError("interpolation points must be distinct")
    K = kernel_gram(kernel, points)
    try:
        c = sla.cho_solve(sla.cho_factor(K, lower=True), values)
    except np.linalg.LinAlgError as exc:
        raise SingularGramError("kernel Gram matrix is singular") from exc
    return KernelInterpolant(kernel, points, c)


@dataclass
class DataFit:
    """Simple-kriging mean ``k*(x)^T K*^{-1} y`` under the integral-type kernel."""

    evaluator: IntegralKernelEvaluator
    points: np.ndarray
    coefficients: np.ndarray

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return self.evaluator.gram([Functionals(IDENTITY, x)], [Functionals(IDENTITY, self.points)]) @ self.coefficients


def stochastic_data_fit(points, values, evaluator: IntegralKernelEvaluator) -> DataFit:
    points = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)
    K = evaluator.gram([Functionals(IDENTITY, points)])
    try:
        c = sla.cho_solve(sla.cho_factor(K, lower=True), values)
    except np.linalg.LinAlgError:
        c = np.linalg.pinv(K, rcond=PINV_CUTOFF, hermitian=True) @ values
    return DataFit(evaluator, points, c)
