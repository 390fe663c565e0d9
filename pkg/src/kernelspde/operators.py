"""Linear differential and boundary operators in one space dimension.

An operator is a finite sum ``sum_a c_a(x) d^a/dx^a`` with derivative orders
``a`` in {0, 1, 2}. Coefficients may be constants or vectorised callables.
"""
from __future__ import annotations

from dataclasses import dataclass
from numbers import Real
from typing import Callable, Union

import numpy as np

from .kernels import DerivativeOrderError

Coefficient = Union[float, Callable]

MAX_ORDER = 2


def _coef_values(coef: Coefficient, x):
    if callable(coef):
        return np.asarray(coef(x), dtype=float)
    return float(coef)


@dataclass(frozen=True)
class DifferentialOperator:
    """``P = sum_a c_a d^a/dx^a`` acting on functions on the closed interval."""

    terms: tuple[tuple[int, Coefficient], ...]
    name: str = "P"

    def __post_init__(self):
        terms = tuple((int(a), c) for a, c in self.terms)
        for a, _ in terms:
            if a < 0 or a > MAX_ORDER:
                raise DerivativeOrderError(f"derivative order {a} outside 0..{MAX_ORDER}")
        object.__setattr__(self, "terms", terms)

    @property
    def order(self) -> int:
        nonzero = [a for a, c in self.terms if callable(c) or c != 0]
        return max(nonzero, default=0)

    def __add__(self, other: "DifferentialOperator") -> "DifferentialOperator":
        return type(self)(self.terms + other.terms, name=f"({self.name}+{other.name})")

    def __rmul__(self, scalar: Real) -> "DifferentialOperator":
        def scaled(c):
            if callable(c):
                return lambda x, c=c: scalar * np.asarray(c(x))
            return scalar * c

        return type(self)(tuple((a, scaled(c)) for a, c in self.terms), name=f"{scalar}*{self.name}")

    def apply(self, derivatives: Callable[[int], np.ndarray], x) -> np.ndarray:
        """Combine ``derivatives(a)`` (the a-th derivative sampled at x) with the coefficients."""
        out = 0.0
        for a, c in self.terms:
            out = out + _coef_values(c, x) * derivatives(a)
        return np.asarray(out, dtype=float)

    def apply_to_function(self, f_derivs: Callable[[int, np.ndarray], np.ndarray], x) -> np.ndarray:
        """Apply to a function given by ``f_derivs(a, x)`` returning its a-th derivative."""
        x = np.asarray(x, dtype=float)
        return self.apply(lambda a: f_derivs(a, x), x)


@dataclass(frozen=True)
class BoundaryOperator(DifferentialOperator):
    """Boundary operator ``B = sum_a b_a d^a/dx^a`` restricted to {0, 1}."""

    name: str = "B"


IDENTITY = DifferentialOperator(((0, 1.0),), name="I")


def identity() -> DifferentialOperator:
    return IDENTITY


def dirichlet() -> BoundaryOperator:
    """Dirichlet trace, the identity restricted to the boundary points."""
    return BoundaryOperator(((0, 1.0),), name="Dirichlet")


def neumann() -> BoundaryOperator:
    return BoundaryOperator(((1, 1.0),), name="Neumann")


def make_step_operator(delta_t: float, diffusion_coefficient: float = 1.0) -> DifferentialOperator:
    """Implicit-Euler step operator ``I - delta_t * a * d^2/dx^2``."""
    if not delta_t > 0:
        raise ValueError(f"delta_t must be positive, got {delta_t}")
    return DifferentialOperator(
        ((0, 1.0), (2, -delta_t * diffusion_coefficient)),
        name=f"I-{delta_t:g}*{diffusion_coefficient:g}D2",
    )


def apply_to_kernel(op: DifferentialOperator, kernel, argument: str, x, y) -> np.ndarray:
    """Apply ``op`` to the ``"first"`` or ``"second"`` argument of ``kernel`` at (x, y).

    Coefficients are evaluated at the point the operator acts on.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if argument == "first":
        return op.apply(lambda a: kernel(x, y, dx=a), x)
    if argument == "second":
        return op.apply(lambda a: kernel(x, y, dy=a), y)
    raise ValueError(f"argument must be 'first' or 'second', got {argument!r}")


def apply_both(left: DifferentialOperator, right: DifferentialOperator, kernel, x, y) -> np.ndarray:
    """``(L_1 R_2 K)(x, y)``: ``left`` on the first argument, ``right`` on the second."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = 0.0
    for a, c in left.terms:
        for b, e in right.terms:
            out = out + _coef_values(c, x) * _coef_values(e, y) * kernel(x, y, dx=a, dy=b)
    return np.asarray(out, dtype=float)
