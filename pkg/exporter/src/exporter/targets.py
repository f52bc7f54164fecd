"""Target functions the example networks are fitted to.

All functions take an (n, d) float array and return an (n,) array; they
are evaluated with numpy only, since training needs target values at
fixed sample points rather than a differentiable graph.
"""

from __future__ import annotations

import math

import numpy as np

GAUSSIAN_CENTER = math.pi
GAUSSIAN_SIGMA = 1.0
GAUSSIAN_DOMAIN = ((0.0, 2.0 * math.pi),)

DISC_EPSILON = 0.5
DISC_DOMAIN = ((-2.0, 2.0), (-2.0, 2.0))

PINN_DOMAIN = ((0.0, 1.0), (0.0, 1.0))


def gaussian_peak(X: np.ndarray) -> np.ndarray:
    """One-dimensional bump exp(-(x - pi)^2 / sigma^2) on [0, 2*pi]."""
    x = np.asarray(X, dtype=np.float64).reshape(-1)
    return np.exp(-((x - GAUSSIAN_CENTER) ** 2) / GAUSSIAN_SIGMA**2)


def _h(t: np.ndarray) -> np.ndarray:
    # exp(-1/t) for t > 0, zero otherwise; guarded so t <= 0 never divides
    out = np.zeros_like(t)
    pos = t > 0.0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_disc(X: np.ndarray) -> np.ndarray:
    """Radial plateau: 1 inside the unit disc, 0 outside radius 1 + eps,
    with a smooth partition-of-unity blend across the transition ring.
    """
    X = np.asarray(X, dtype=np.float64)
    r = np.sqrt((X**2).sum(axis=1))
    up = _h(1.0 + DISC_EPSILON - r)
    down = _h(r - 1.0)
    denom = up + down
    out = np.where(r <= 1.0, 1.0, 0.0)
    ring = (r > 1.0) & (r < 1.0 + DISC_EPSILON)
    out[ring] = up[ring] / denom[ring]
    return out


def pinn_solution(X: np.ndarray) -> np.ndarray:
    """tanh(x1 + x2 - 1), the wavefront the PINN is steered toward."""
    X = np.asarray(X, dtype=np.float64)
    return np.tanh(X[:, 0] + X[:, 1] - 1.0)


def pinn_source(X: np.ndarray) -> np.ndarray:
    """Laplacian of the wavefront: -4 (1 - tanh^2 z) tanh z with z = x1 + x2 - 1."""
    t = pinn_solution(X)
    return -4.0 * (1.0 - t * t) * t


TARGETS = {
    "gaussian_peak": (gaussian_peak, GAUSSIAN_DOMAIN),
    "smooth_disc": (smooth_disc, DISC_DOMAIN),
    "pinn_tanh": (pinn_solution, PINN_DOMAIN),
}
