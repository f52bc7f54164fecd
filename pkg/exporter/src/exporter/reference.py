"""Independent reference values for norms and residuals.

Estimates are computed from the torch model with autograd derivatives,
sharing no numerical code with the certifier; they serve as oracles for
its certified brackets, never as certificates themselves. All references
are for the p-th power integral, matching the certifier's Q/eta scale.
"""

from __future__ import annotations

import math

import numpy as np
import torch
from torch import nn

from .export import import_weights


def _as_model(model) -> nn.Module:
    if isinstance(model, nn.Module):
        return model
    return import_weights(model)


def _volume(omega) -> float:
    return float(np.prod([hi - lo for lo, hi in omega]))


def _derivatives(model: nn.Module, X: torch.Tensor, order: int):
    """Values, per-sample Jacobians, and Hessians of a batched forward pass.

    Rows of X are independent samples, so summing an output over the batch
    before autograd.grad yields the per-sample derivative rows.
    """
    if order > 0:
        X = X.requires_grad_(True)
    u = model(X)
    n, m = u.shape
    d = X.shape[1]
    J = H = None
    if order >= 1:
        rows = []
        for i in range(m):
            (g,) = torch.autograd.grad(u[:, i].sum(), X, create_graph=order == 2,
                                       allow_unused=True)
            rows.append(torch.zeros_like(X) if g is None else g)
        J = torch.stack(rows, dim=1)
    if order == 2:
        blocks = []
        for i in range(m):
            hrows = []
            for a in range(d):
                if J[:, i, a].requires_grad:
                    (h,) = torch.autograd.grad(J[:, i, a].sum(), X, retain_graph=True,
                                               allow_unused=True)
                else:
                    h = None
                hrows.append(torch.zeros_like(X) if h is None else h)
            blocks.append(torch.stack(hrows, dim=1))
        H = torch.stack(blocks, dim=1)
    return u, J, H


def sobolev_integrand_values(model: nn.Module, X_np: np.ndarray, k: int, p: float) -> np.ndarray:
    """Pointwise W^{k,p} integrand: |values|^p plus all |first derivatives|^p
    plus the upper-triangle |second derivatives|^p, summed per sample.
    """
    X = torch.as_tensor(np.asarray(X_np, dtype=np.float64))
    u, J, H = _derivatives(model, X, k)
    total = (u.detach().abs() ** p).sum(dim=1)
    if k >= 1:
        total = total + (J.detach().abs() ** p).sum(dim=(1, 2))
    if k == 2:
        d = X.shape[1]
        iu, ju = np.triu_indices(d)
        total = total + (H.detach()[:, :, iu, ju].abs() ** p).sum(dim=(1, 2))
    return total.numpy()


def laplace_residual_values(model: nn.Module, X_np: np.ndarray, source, p: float) -> np.ndarray:
    """Pointwise |Laplacian(model) - source|^p for scalar-output models."""
    X = torch.as_tensor(np.asarray(X_np, dtype=np.float64))
    _, _, H = _derivatives(model, X, 2)
    lap = H.detach()[:, 0].diagonal(dim1=1, dim2=2).sum(dim=1).numpy()
    return np.abs(lap - source(X_np)) ** p


def _grid_points(omega, budget: int) -> np.ndarray:
    d = len(omega)
    per_axis = max(1, round(budget ** (1.0 / d)))
    axes = [lo + (hi - lo) * (np.arange(per_axis) + 0.5) / per_axis for lo, hi in omega]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _estimate(values: np.ndarray, omega, method: str, samples: int, seed: int,
              k: int | None, p: float) -> dict:
    vol = _volume(omega)
    estimate = vol * float(values.mean())
    if method == "mc":
        stderr = vol * float(values.std(ddof=1)) / math.sqrt(values.size) if values.size > 1 else 0.0
    else:
        stderr = 0.0
    out = {
        "estimate": estimate,
        "stderr": stderr,
        "method": method,
        "samples": int(values.size),
        "seed": seed,
        "p": p,
    }
    if k is not None:
        out["k"] = k
    return out


def reference_norm(model, omega, k: int, p: float, method: str = "mc",
                   samples: int = 50_000, seed: int = 0) -> dict:
    """Reference value of the W^{k,p} norm's p-th power integral over omega.

    Args:
        model: a torch module, or the path of an exported weight file.
        omega: per-axis (lo, hi) bounds.
        k: Sobolev order, 0, 1, or 2.
        p: norm exponent.
        method: "mc" for seeded uniform Monte Carlo with a standard error,
            "grid" for a midpoint composite over about `samples` points
            (stderr reported as 0).
        samples: sample count or grid budget.
        seed: MC seed; ignored for grids.

    Returns:
        Dict with estimate, stderr, method, samples, seed, k, and p.
    """
    if k not in (0, 1, 2):
        raise ValueError(f"k must be 0, 1, or 2, got {k}")
    if method not in ("mc", "grid"):
        raise ValueError(f"method must be mc or grid, got {method!r}")
    net = _as_model(model)
    if method == "mc":
        rng = np.random.default_rng(seed)
        lo = np.array([a for a, _ in omega])
        hi = np.array([b for _, b in omega])
        X = rng.uniform(lo, hi, size=(samples, len(omega)))
    else:
        X = _grid_points(omega, samples)
    values = _batched(lambda chunk: sobolev_integrand_values(net, chunk, k, p), X)
    return _estimate(values, omega, method, samples, seed, k, p)


def reference_residual(model, omega, source, p: float = 2.0, samples: int = 100_000,
                       seed: int = 0) -> dict:
    """Monte-Carlo reference for the Laplace residual power integral
    of a scalar model: the mean of |Laplacian - source|^p times the volume.
    """
    net = _as_model(model)
    rng = np.random.default_rng(seed)
    lo = np.array([a for a, _ in omega])
    hi = np.array([b for _, b in omega])
    X = rng.uniform(lo, hi, size=(samples, len(omega)))
    values = _batched(lambda chunk: laplace_residual_values(net, chunk, source, p), X)
    return _estimate(values, omega, "mc", samples, seed, None, p)


def _batched(fn, X: np.ndarray, chunk: int = 20_000) -> np.ndarray:
    parts = [fn(X[i:i + chunk]) for i in range(0, X.shape[0], chunk)]
    return np.concatenate(parts)
