"""
Multiplicative noise
====================

With dU = U_xx dt + psi(U) dW the noise amplitude depends on the state. A
constant psi reproduces the additive solver bit for bit.
"""

# %%
import numpy as np

from kernelspde import (MaternKernel, NoiseModel, SpdeProblem, path_stream, run_path,
                        run_path_multiplicative, uniform_collocation)

problem = SpdeProblem(uniform_collocation(20), MaternKernel(3, 26.5), T=0.5, n_steps=100)
model = NoiseModel("r2", sigma=0.5, delta_t=problem.delta_t)

add = run_path(problem, model, path_stream(1, 0))
const = run_path_multiplicative(problem, model, lambda u: 0.5, path_stream(1, 0))
print("constant psi identical to additive:", np.array_equal(add.values, const.values))

# %%
# Linear psi: the noise dies out together with the solution.
lin = run_path_multiplicative(problem, model, lambda u: u, path_stream(1, 0))
print("sup |u| at t = 0.1, 0.3, 0.5:", [f"{np.max(np.abs(lin.values[j])):.3f}" for j in (19, 59, 99)])
