"""The integral-type kernel K*(x, y) = int_0^1 K(x, z) K(y, z) dz and its
operator-applied variants, evaluated by composite Gauss-Legendre quadrature.

Operators are applied under the integral sign,

    (L_1 R_2 K*)(x, y) = int_0^1 (L K)(x, z) (R K)(y, z) dz,

with L and R acting on the first argument of the base kernel. The base
kernel has a derivative kink on the diagonal, so every evaluation splits the
panels at the points involved; the integrand is then analytic on each piece.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .operators import IDENTITY, DifferentialOperator

DEFAULT_PANELS = 64
DEFAULT_NODES = 10
# evaluation points per quadrature rebuild in gram(); bounds memory for long grids
CHUNK = 64


@dataclass(frozen=True)
class QuadratureRule:
    """Composite Gauss-Legendre rule on [0, 1] with equal panels."""

    panels: int = DEFAULT_PANELS
    nodes_per_panel: int = DEFAULT_NODES

    def __post_init__(self):
        if self.panels < 1 or self.nodes_per_panel < 1:
            raise ValueError("panels and nodes_per_panel must be positive")

    def reference(self):
        return np.polynomial.legendre.leggauss(self.nodes_per_panel)

    def nodes_weights(self, breakpoints: Sequence[float] = ()):
        """Nodes and weights with extra panel edges inserted at ``breakpoints``."""
        edges = np.linspace(0.0, 1.0, self.panels + 1)
        extra = np.asarray(breakpoints, dtype=float).ravel()
        extra = extra[(extra > 0.0) & (extra < 1.0)]
        if extra.size:
            edges = np.unique(np.concatenate([edges, extra]))
        t, w = self.reference()
        a = edges[:-1, None]
        half = 0.5 * np.diff(edges)[:, None]
        nodes = (a + half * (t[None, :] + 1.0)).ravel()
        weights = (half * w[None, :]).ravel()
        return nodes, weights

    @property
    def nodes(self):
        return self.nodes_weights()[0]

    @property
    def weights(self):
        return self.nodes_weights()[1]


# A block of linear functionals: one operator applied at a set of points.
@dataclass(frozen=True)
class Functionals:
    op: DifferentialOperator
    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", np.atleast_1d(np.asarray(self.points, dtype=float)))

    def __len__(self):
        return len(self.points)

    def key(self):
        return (self.op, self.points.tobytes())


def _as_blocks(blocks) -> list[Functionals]:
    if isinstance(blocks, Functionals):
        return [blocks]
    return list(blocks)


@dataclass
class IntegralKernelEvaluator:
    """Quadrature evaluator for K* built on ``kernel``.

    ``gram(..., cache=True)`` memoises by (left functionals, right functionals);
    the cache is guarded by a lock so concurrent readers are safe.
    """

    kernel: object
    rule: QuadratureRule = field(default_factory=QuadratureRule)
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def features(self, blocks, nodes, weights) -> np.ndarray:
        """Matrix with columns ``sqrt(w_q) (L K)(x_j, z_q)`` for every functional."""
        sw = np.sqrt(weights)[:, None]
        cols = []
        for blk in _as_blocks(blocks):
            x = blk.points[None, :]
            z = nodes[:, None]
            cols.append(sw * blk.op.apply(lambda a: self.kernel(x, z, dx=a), x))
        return np.concatenate(cols, axis=1) if cols else np.zeros((len(nodes), 0))

    def breakpoints(self, *blocks) -> np.ndarray:
        pts = [b.points for group in blocks for b in _as_blocks(group)]
        return np.unique(np.concatenate(pts)) if pts else np.zeros(0)

    def _gram(self, left, right) -> np.ndarray:
        nodes, weights = self.rule.nodes_weights(self.breakpoints(left, right))
        fl = self.features(left, nodes, weights)
        fr = self.features(right, nodes, weights)
        return fl.T @ fr

    def gram(self, left, right=None, cache: bool = False) -> np.ndarray:
        """Matrix of ``int (L K)(x_i, z) (R K)(y_j, z) dz`` over all functional pairs.

        ``left`` and ``right`` are a :class:`Functionals` or a list of them.
        With ``right`` omitted the result is symmetrised exactly.
        """
        symmetric = right is None
        right = left if symmetric else right
        lb, rb = _as_blocks(left), _as_blocks(right)
        key = (tuple(b.key() for b in lb), tuple(b.key() for b in rb), self.rule)
        if cache:
            with self._lock:
                hit = self._cache.get(key)
            if hit is not None:
                return hit
        n_left = sum(len(b) for b in lb)
        if symmetric or n_left <= CHUNK:
            out = self._gram(lb, rb)
        else:
            rows = []
            for blk in lb:
                for s in range(0, len(blk), CHUNK):
                    rows.append(self._gram([Functionals(blk.op, blk.points[s:s + CHUNK])], rb))
            out = np.vstack(rows)
        if symmetric:
            out = 0.5 * (out + out.T)
        out.setflags(write=False)
        if cache:
            with self._lock:
                self._cache[key] = out
        return out

    def op_kstar(self, left_op, right_op, x: float, y: float) -> float:
        """``(L_1 R_2 K*)(x, y)`` for scalar points; symmetric under swapping both."""
        left_op = IDENTITY if left_op is None else left_op
        right_op = IDENTITY if right_op is None else right_op
        nodes, weights = self.rule.nodes_weights(sorted({float(x), float(y)}))
        a = self.features(Functionals(left_op, [x]), nodes, weights)[:, 0]
        b = self.features(Functionals(right_op, [y]), nodes, weights)[:, 0]
        return float(np.dot(a, b))

    def kstar(self, x: float, y: float) -> float:
        return self.op_kstar(IDENTITY, IDENTITY, x, y)

    def clear_cache(self):
        with self._lock:
            self._cache.clear()
