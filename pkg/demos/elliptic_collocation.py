"""
Collocation for an elliptic problem
===================================

One implicit-Euler step of the heat equation is the elliptic problem
(I - dt d^2/dx^2) u = f with u(0) = u(1) = 0. Collocation fits the operator
values exactly at the points and returns a smooth estimator plus a
pointwise standard deviation sigma(x).
"""

# %%
import numpy as np

from kernelspde import (IntegralKernelEvaluator, MaternKernel, assemble, dirichlet, error_probability,
                        make_step_operator, power_function, solve_elliptic, uniform_collocation)

dt = 1 / 200
P = make_step_operator(dt)
exact = lambda x: np.sin(np.pi * x)
f = lambda x: (1 + dt * np.pi**2) * np.sin(np.pi * x)
g = lambda x: np.zeros_like(x)
ev = IntegralKernelEvaluator(MaternKernel(3, 26.5))

# %%
# Refining the points shrinks both the true error and sigma.
grid = np.linspace(0, 1, 201)
for n in (9, 19, 39):
    system = assemble(uniform_collocation(n), P, dirichlet(), ev)
    u = solve_elliptic(system, f, g)
    err = np.max(np.abs(u(grid) - exact(grid)))
    print(f"N={n:3d}  max error {err:.2e}  residual {u.residual():.1e}  "
          f"max sigma {power_function(system, grid).max():.2e}")

# %%
# sigma turns into a probability that the random field strays more than
# eps from the estimate at x.
x = np.array([0.05, 0.25, 0.5])
print("P(|S_x - u(x)| >= 1e-12):", error_probability(system, x, 1e-12))
