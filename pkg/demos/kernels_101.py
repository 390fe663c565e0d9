"""
Matérn kernels and the integral-type kernel
===========================================

The Sobolev-spline (Matérn) kernel of integer order m is a polynomial times
an exponential in one dimension. Squaring it under an integral gives K*, the
covariance that the collocation solvers actually use.
"""

# %%
# The m = 3 kernel at the origin is 3 / (16 theta^5); derivatives come from
# the same closed form.
import numpy as np

from kernelspde import IntegralKernelEvaluator, MaternKernel
from kernelspde.kernels import BrownianBridgeKernel, IntegratedBridgeKernel

k = MaternKernel(m=3, theta=26.5)
print("K(0)            =", k(0.5, 0.5), " vs 3/(16 theta^5) =", 3 / (16 * 26.5**5))
r = np.array([0.01, 0.05, 0.1, 0.2])
print("K(r)            =", k(r, 0.0))
print("d/dx K(r)       =", k(r, 0.0, dx=1))
print("d2/dx dy K(r)   =", k(r, 0.0, dx=1, dy=1))

# %%
# K* is evaluated by panel Gauss-Legendre quadrature. With the Brownian
# bridge min(x, y) - xy as the base kernel, K* is again a closed-form
# piecewise cubic, which makes a handy accuracy check.
ev = IntegralKernelEvaluator(BrownianBridgeKernel())
grid = np.linspace(0.1, 0.9, 5)
err = max(abs(ev.kstar(x, y) - IntegratedBridgeKernel()(x, y)) for x in grid for y in grid)
print(f"max |K*_bridge - closed form| on a 5x5 grid: {err:.2e}")

# %%
# For the Matérn kernel K* is much smaller in magnitude and smoother.
ev = IntegralKernelEvaluator(k)
print("K*(0.5, 0.5) =", ev.kstar(0.5, 0.5), " K*(0.5, 0.6) =", ev.kstar(0.5, 0.6))
