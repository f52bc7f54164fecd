"""Positive-weight quadrature rules on boxes.

Rules here never carry error estimates of their own. A rule evaluates the
integrand at points inside the box with positive weights summing to the box
volume, so the computed value always lies in ``F(K) * vol(K)`` for any sound
enclosure ``F``; certified error control lives entirely on the enclosure
side. The optional :func:`exact_for_affine_piece` shortcut recognises boxes
where a ReLU network is affine and a high enough Gauss rule integrates the
p-th power integrand with zero truncation error.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .enclosure import affine_on_box, fval
from .errors import EvaluatorFailure
from .interval import Box
from .network import Network, forward_batch

__all__ = [
    "QuadratureRule",
    "RuleKind",
    "midpoint",
    "gauss_tensor",
    "integrate",
    "exact_for_affine_piece",
]


class RuleKind(enum.Enum):
    MIDPOINT = "midpoint"
    GAUSS_TENSOR = "gauss_tensor"


def _legendre(n: int, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Value and derivative of the degree-n Legendre polynomial at t."""
    p_prev = np.ones_like(t)
    p = t.copy()
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * t * p - (k - 1) * p_prev) / k
    dp = n * (t * p - p_prev) / (t * t - 1.0)
    return p, dp


def _gauss_nodes_1d(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration."""
    if n == 1:
        return np.zeros(1), np.full(1, 2.0)
    k = np.arange(n, dtype=float)
    t = np.cos(math.pi * (4.0 * k + 3.0) / (4.0 * n + 2.0))
    for _ in range(100):
        p, dp = _legendre(n, t)
        step = p / dp
        # residual target, with a stagnation exit for nodes whose large
        # derivative keeps the residual pinned at a few ulps above it
        if np.max(np.abs(p)) <= 1e-15 or np.max(np.abs(step)) < 1e-16:
            break
        t = t - step
    w = 2.0 / ((1.0 - t * t) * dp * dp)
    order = np.argsort(t)
    return t[order], w[order]


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """A fixed rule, stored as reference nodes and weights on [-1, 1].

    Build instances through :func:`midpoint` or :func:`gauss_tensor`; the
    constructor is not meant to be called with hand-rolled node sets.
    """

    kind: RuleKind
    degree: int
    nodes_1d: np.ndarray = field(repr=False)
    weights_1d: np.ndarray = field(repr=False)

    def nodes_weights(self, K: Box) -> tuple[np.ndarray, np.ndarray]:
        """Nodes (m, d) inside K and positive weights (m,) summing to vol(K)."""
        mid = K.midpoint()
        half = 0.5 * (K.hi - K.lo)
        if self.kind is RuleKind.MIDPOINT:
            return mid[None, :], np.array([K.volume()])
        d = K.dim
        axes_nodes = [mid[j] + half[j] * self.nodes_1d for j in range(d)]
        axes_weights = [half[j] * self.weights_1d for j in range(d)]
        grids = np.meshgrid(*axes_nodes, indexing="ij")
        X = np.stack([g.reshape(-1) for g in grids], axis=1)
        w = reduce(np.multiply.outer, axes_weights).reshape(-1)
        return np.clip(X, K.lo, K.hi), w


def midpoint() -> QuadratureRule:
    """The one-point midpoint rule (degree 1; the default everywhere)."""
    return QuadratureRule(RuleKind.MIDPOINT, 1, np.zeros(1), np.full(1, 2.0))


def gauss_tensor(n: int) -> QuadratureRule:
    """Tensor-product Gauss-Legendre rule with n nodes per axis.

    Args:
        n: nodes per axis, at least 1. The rule has degree 2n - 1 per axis.

    Returns:
        The rule; nodes and weights are generated on construction rather
        than looked up, so any n works.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"gauss_tensor needs an integer n >= 1, got {n!r}")
    nodes, weights = _gauss_nodes_1d(n)
    return QuadratureRule(RuleKind.GAUSS_TENSOR, 2 * n - 1, nodes, weights)


def integrate(rule: QuadratureRule, f, K: Box) -> float:
    """Apply a rule to a point evaluator on a box.

    Args:
        rule: the quadrature rule.
        f: vectorised evaluator mapping an (m, d) array of points to an
            (m,) array of values.
        K: integration box.

    Returns:
        The weighted sum. Because all nodes lie in K and the positive
        weights sum to vol(K), the result lies in F(K) * vol(K) for any
        sound enclosure F of f.

    Raises:
        EvaluatorFailure: if the evaluator raises or returns a value set
            containing NaN.
    """
    X, w = rule.nodes_weights(K)
    try:
        vals = np.asarray(f(X), dtype=float)
    except EvaluatorFailure:
        raise
    except Exception as exc:
        raise EvaluatorFailure(f"integrand raised {type(exc).__name__}: {exc}") from exc
    if vals.shape != (X.shape[0],):
        raise EvaluatorFailure(
            f"integrand returned shape {vals.shape}, expected ({X.shape[0]},)"
        )
    if np.any(np.isnan(vals)):
        raise EvaluatorFailure("integrand returned NaN")
    return float(w @ vals)


def exact_for_affine_piece(net: Network, p: int, K: Box,
                           cap: int | None = None) -> float | None:
    """Exact integral of sum_i |Phi_i|^p over a box where the net is affine.

    Applies only to ReLU networks. When the activation pattern is constant
    across the vertices of K the network restricted to K is affine, so the
    integrand is a piecewise power of an affine map. A Gauss rule of degree
    at least p then integrates it without truncation error, provided the
    integrand really is a polynomial on K: always true for even p, and true
    for odd p when no output component straddles zero.

    Args:
        net: ReLU network.
        p: positive integer power.
        K: candidate box.

    Returns:
        The integral when exactness can be certified, otherwise None.
    """
    if not isinstance(p, int) or p < 1:
        raise ValueError(f"p must be a positive integer, got {p!r}")
    if not affine_on_box(net, K, cap=cap):
        return None
    if p % 2 == 1:
        out = fval(net, net.depth + 1, K)
        if np.any((out.lo < 0.0) & (out.hi > 0.0)):
            return None
    rule = gauss_tensor((p + 1 + 1) // 2)  # ceil((p+1)/2)

    def integrand(X: np.ndarray) -> np.ndarray:
        return np.sum(np.abs(forward_batch(net, X)) ** p, axis=1)

    return integrate(rule, integrand, K)
