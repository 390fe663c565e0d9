"""
Stochastic heat equation
========================

dU = U_xx dt + sigma dW on (0, 1) with zero boundary values. Every time step
is one product with a precomputed matrix, so an ensemble of paths is cheap.
The sample statistics are compared with the sine-series solution.
"""

# %%
import numpy as np

from kernelspde import (MaternKernel, NoiseModel, SpdeProblem, SpectralHeatSolution, exact_mean,
                        exact_var, run_ensemble, uniform_collocation)

problem = SpdeProblem(uniform_collocation(30), MaternKernel(3, 26.5), T=1.0, n_steps=200)
model = NoiseModel("r1", sigma=1.0, delta_t=problem.delta_t)
ens = run_ensemble(problem, model, n_paths=400, master_seed=0)
oracle = SpectralHeatSolution(roughness=1, sigma=1.0)

# %%
# Mean error and variance ratio at a few times. With a few hundred paths the
# variance ratio carries a few percent of sampling noise.
x = problem.points.interior
for t in (0.1, 0.5, 1.0):
    j = int(round(t / problem.delta_t)) - 1
    print(f"t={t:.1f}  max |mean - exact| {np.max(np.abs(ens.mean[j] - exact_mean(oracle, t, x))):.4f}  "
          f"var ratio at x={x[14]:.3f}: {ens.var[j, 14] / exact_var(oracle, t, x[14]):.3f}")
