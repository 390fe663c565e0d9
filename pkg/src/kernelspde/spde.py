"""Stochastic solvers built on the collocation system.

The parabolic problem ``dU = U_xx dt + sigma dW`` with Dirichlet boundary
values is stepped by implicit Euler. Each step is the elliptic problem
``(I - dt d^2/dx^2) u^j = u^{j-1} + xi`` solved by collocation, so with the
step matrix ``A = B~ K*_PB^{-1}`` a step is one matrix-vector product:

    u^j = A (u^{j-1} + xi ; 0).

Noise vectors are sampled at the interior points from N(0, sigma^2 dt R).
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .collocation import CollocationSet, CollocationSystem, Estimator, assemble, solve_with_data
from .integral import IntegralKernelEvaluator, QuadratureRule
from .kernels import MaternKernel, covariance_kernel, gram
from .operators import dirichlet, make_step_operator

log = logging.getLogger(__name__)

JITTER = 1e-12
JITTER_GROWTH = 10.0
JITTER_ATTEMPTS = 3


class NoiseFactorizationError(np.linalg.LinAlgError):
    pass


class BlowUpError(ArithmeticError):
    pass


def path_stream(master_seed: int, path_index: int) -> np.random.Generator:
    """Independent generator for one path, keyed by (master_seed, path_index)."""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(path_index),))
    return np.random.Generator(np.random.PCG64(seq))


def u0_default(x):
    """sqrt(2) (sin(pi x) + sin(2 pi x) + sin(3 pi x))."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(2.0) * (np.sin(np.pi * x) + np.sin(2 * np.pi * x) + np.sin(3 * np.pi * x))


@dataclass
class NoiseModel:
    """Gaussian noise with covariance ``sigma^2 delta_t R(x_j, x_k)``.

    Sampling factors the unit-amplitude matrix ``delta_t R`` once and scales
    the correlated draw by sigma (or by psi(u) for multiplicative noise).
    """

    covariance: object = "r1"
    sigma: float = 1.0
    delta_t: float = 1e-3
    jitter: float = JITTER
    _factors: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if isinstance(self.covariance, str):
            self.covariance = covariance_kernel(self.covariance)
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if not self.delta_t > 0:
            raise ValueError("delta_t must be positive")

    def base_matrix(self, points) -> np.ndarray:
        """``Psi_0 = delta_t R`` at the given points."""
        return self.delta_t * gram(self.covariance, points)

    def matrix(self, points) -> np.ndarray:
        return self.sigma**2 * self.base_matrix(points)

    def factor(self, points) -> np.ndarray:
        """Lower Cholesky factor of ``Psi_0 + jitter I`` with escalating jitter."""
        points = np.asarray(points, dtype=float)
        key = points.tobytes()
        if key in self._factors:
            return self._factors[key]
        psi0 = self.base_matrix(points)
        eps = self.jitter * float(np.max(np.diag(psi0)))
        eye = np.eye(len(points))
        for _ in range(JITTER_ATTEMPTS):
            try:
                L = np.linalg.cholesky(psi0 + eps * eye)
                break
            except np.linalg.LinAlgError:
                log.debug("noise covariance not PD with jitter %.3e, escalating", eps)
                eps *= JITTER_GROWTH
        else:
            raise NoiseFactorizationError(
                f"noise covariance factorization failed after {JITTER_ATTEMPTS} jitter attempts"
            )
        self._factors[key] = L
        return L

    def unit_draw(self, points, stream: np.random.Generator) -> np.ndarray:
        """One draw from N(0, Psi_0)."""
        L = self.factor(points)
        return L @ stream.standard_normal(L.shape[0])


def sample_noise(model: NoiseModel, points: CollocationSet, stream: np.random.Generator) -> np.ndarray:
    """xi ~ N(0, sigma^2 dt R) at the interior collocation points."""
    return model.sigma * model.unit_draw(points.interior, stream)


def solve_elliptic_spde(system: CollocationSystem, f: Callable, g: Callable, noise) -> Estimator:
    """Collocation estimator for ``P u = f + xi`` inside, ``B u = g`` on the boundary."""
    pts = system.points
    noise = np.asarray(noise, dtype=float)
    if noise.shape != (pts.N,):
        raise ValueError(f"noise must have length N={pts.N}, got shape {noise.shape}")
    y = np.concatenate([np.broadcast_to(f(pts.interior), (pts.N,)) + noise,
                        np.broadcast_to(g(pts.boundary), (pts.M,))]).astype(float)
    return solve_with_data(system, y)


def precompute_step(system: CollocationSystem, points: CollocationSet | None = None):
    """Return ``(A, B~)`` with ``B~ = k_PB(interior points)`` and ``A = B~ K*_PB^{-1}``."""
    points = system.points if points is None else points
    btilde = system.basis(points.interior)
    # K*_PB is symmetric, so A^T = K*_PB^{-1} B~^T
    A = system.solve(btilde.T).T
    return np.ascontiguousarray(A), btilde


@dataclass
class SpdeProblem:
    """Stochastic heat equation on (0, 1) with zero Dirichlet data."""

    points: CollocationSet
    kernel: MaternKernel = field(default_factory=lambda: MaternKernel(3, 26.5))
    T: float = 1.0
    n_steps: int = 800
    u0: Callable = u0_default
    diffusion: float = 1.0
    rule: QuadratureRule = field(default_factory=QuadratureRule)
    _stepper: tuple | None = field(default=None, repr=False)
    precompute_calls: int = field(default=0, repr=False)

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if not self.T > 0:
            raise ValueError("T must be positive")
        if np.any(np.abs(self.u0(np.array([0.0, 1.0]))) > 1e-12):
            raise ValueError("u0 must vanish on the boundary")

    @property
    def delta_t(self) -> float:
        return self.T / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return self.delta_t * np.arange(1, self.n_steps + 1)

    def system(self) -> CollocationSystem:
        return self.stepper()[0]

    def stepper(self):
        """(system, A) built once and shared by every path."""
        if self._stepper is None:
            P = make_step_operator(self.delta_t, self.diffusion)
            system = assemble(self.points, P, dirichlet(), IntegralKernelEvaluator(self.kernel, self.rule))
            A, _ = precompute_step(system)
            self.precompute_calls += 1
            self._stepper = (system, A)
        return self._stepper


@dataclass
class PathResult:
    """Trajectory ``values[j, k]`` = u at (t_{j+1}, x_k) for j = 0..n-1."""

    values: np.ndarray
    times: np.ndarray
    points: np.ndarray
    master_seed: int | None = None
    path_index: int | None = None


def _step(A: np.ndarray, u: np.ndarray, xi: np.ndarray, M: int) -> np.ndarray:
    return A @ np.concatenate([u + xi, np.zeros(M)])


def _march(problem: SpdeProblem, noise: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    _, A = problem.stepper()
    pts = problem.points
    u = np.asarray(problem.u0(pts.interior), dtype=float)
    out = np.empty((problem.n_steps, pts.N))
    for j in range(problem.n_steps):
        # non-finite states are reported below with the step index
        with np.errstate(invalid="ignore", over="ignore"):
            u = _step(A, u, noise(u), pts.M)
        if not np.all(np.isfinite(u)):
            raise BlowUpError(f"non-finite state at step {j + 1}")
        out[j] = u
    return out


def run_path(problem: SpdeProblem, model: NoiseModel, stream: np.random.Generator,
             master_seed: int | None = None, path_index: int | None = None) -> PathResult:
    """One sample path of the additive-noise scheme."""
    interior = problem.points.interior
    values = _march(problem, lambda u: model.sigma * model.unit_draw(interior, stream))
    return PathResult(values, problem.times, interior, master_seed, path_index)


def run_path_multiplicative(problem: SpdeProblem, model: NoiseModel, psi: Callable,
                            stream: np.random.Generator, master_seed: int | None = None,
                            path_index: int | None = None) -> PathResult:
    """Sample path for ``dU = U_xx dt + psi(U) dW``.

    The noise at step j is ``V (L z)`` with ``V = diag(psi(u^{j-1}))`` and
    ``L L^T = dt R``, a draw from N(0, V Psi_0 V). ``model.sigma`` is unused.
    """
    interior = problem.points.interior

    def noise(u):
        scale = np.broadcast_to(np.asarray(psi(u), dtype=float), u.shape)
        return scale * model.unit_draw(interior, stream)

    values = _march(problem, noise)
    return PathResult(values, problem.times, interior, master_seed, path_index)


@dataclass
class EnsembleStats:
    """Per-(t_j, x_k) sample mean and divisor-s sample variance."""

    times: np.ndarray
    points: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    n_paths: int
    master_seed: int
    samples: np.ndarray | None = None


def run_ensemble(problem: SpdeProblem, model: NoiseModel, n_paths: int, master_seed: int = 0,
                 workers: int = 1, keep_samples: bool = False,
                 path_fn: Callable | None = None) -> EnsembleStats:
    """Simulate ``n_paths`` independent paths and reduce them in path order.

    Path i uses ``path_stream(master_seed, i)``; results do not depend on
    ``workers``. ``path_fn(problem, model, stream)`` overrides the path
    simulator (defaults to :func:`run_path`).
    """
    if n_paths < 2:
        raise ValueError("n_paths must be >= 2")
    path_fn = run_path if path_fn is None else path_fn
    problem.stepper()
    out = np.empty((n_paths, problem.n_steps, problem.points.N))

    def task(i):
        out[i] = path_fn(problem, model, path_stream(master_seed, i)).values

    if workers <= 1:
        for i in range(n_paths):
            task(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(task, range(n_paths)))
    mean = out.mean(axis=0)
    var = np.mean((out - mean) ** 2, axis=0)
    return EnsembleStats(problem.times, problem.points.interior, mean, var, n_paths,
                         master_seed, out if keep_samples else None)
