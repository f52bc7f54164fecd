"""Desk-scale training runs for the example networks."""

from __future__ import annotations

import logging
import math
import os

import numpy as np
import torch

from .export import export_weights
from .models import ExperimentSpec, model_for
from .targets import PINN_DOMAIN, TARGETS, pinn_solution, pinn_source

log = logging.getLogger(__name__)


def _uniform(rng: np.random.Generator, domain, n: int) -> np.ndarray:
    lo = np.array([a for a, _ in domain])
    hi = np.array([b for _, b in domain])
    return rng.uniform(lo, hi, size=(n, len(domain)))


def _fit_supervised(model, spec: ExperimentSpec, rng: np.random.Generator) -> float:
    target_fn, domain = TARGETS[spec.target]
    n = 1000 * len(domain)
    X_np = _uniform(rng, domain, n)
    X = torch.as_tensor(X_np)
    y = torch.as_tensor(target_fn(X_np)).unsqueeze(1)
    opt = torch.optim.Adam(model.parameters(), lr=spec.learning_rate,
                           weight_decay=spec.weight_decay)
    loss_val = float("nan")
    for _ in range(spec.epochs):
        opt.zero_grad()
        loss = torch.mean((model(X) - y) ** 2)
        loss.backward()
        opt.step()
        loss_val = loss.item()
    return loss_val


def _laplacian(model, X: torch.Tensor) -> torch.Tensor:
    u = model(X)
    (g,) = torch.autograd.grad(u.sum(), X, create_graph=True)
    lap = torch.zeros(X.shape[0], dtype=X.dtype)
    for a in range(X.shape[1]):
        (h,) = torch.autograd.grad(g[:, a].sum(), X, create_graph=True)
        lap = lap + h[:, a]
    return lap


def _boundary_points(rng: np.random.Generator, n: int) -> np.ndarray:
    """n points on the edges of the unit square, n/4 per edge."""
    per = n // 4
    t = rng.uniform(0.0, 1.0, size=per)
    edges = [
        np.stack([t, np.zeros(per)], axis=1),
        np.stack([t, np.ones(per)], axis=1),
        np.stack([np.zeros(per), rng.uniform(0.0, 1.0, size=per)], axis=1),
        np.stack([np.ones(per), rng.uniform(0.0, 1.0, size=per)], axis=1),
    ]
    return np.concatenate(edges)


def _fit_pinn(model, spec: ExperimentSpec, rng: np.random.Generator) -> float:
    """Collocation fit of the tanh-wavefront Poisson problem on the unit
    square: squared interior residual plus squared boundary mismatch.
    """
    Xi_np = _uniform(rng, PINN_DOMAIN, 1000)
    Xb_np = _boundary_points(rng, 800)
    Xi = torch.as_tensor(Xi_np).requires_grad_(True)
    Xb = torch.as_tensor(Xb_np)
    f = torch.as_tensor(pinn_source(Xi_np))
    ub = torch.as_tensor(pinn_solution(Xb_np)).unsqueeze(1)
    opt = torch.optim.Adam(model.parameters(), lr=spec.learning_rate,
                           weight_decay=spec.weight_decay)
    loss_val = float("nan")
    for _ in range(spec.epochs):
        opt.zero_grad()
        interior = torch.mean((_laplacian(model, Xi) - f) ** 2)
        boundary = torch.mean((model(Xb) - ub) ** 2)
        loss = interior + boundary
        loss.backward()
        opt.step()
        loss_val = loss.item()
    return loss_val


def train_experiments(spec: ExperimentSpec, out_dir) -> str:
    """Train (or just initialize) one experiment network and export it.

    Args:
        spec: the experiment description; random_init exports the seeded
            initialization without any optimizer steps.
        out_dir: directory the weight file is written into.

    Returns:
        Path of the exported weight file, named after the spec.
    """
    model = model_for(spec)
    if spec.target != "random_init" and spec.epochs > 0:
        rng = np.random.default_rng(spec.seed)
        fit = _fit_pinn if spec.target == "pinn_tanh" else _fit_supervised
        final_loss = fit(model, spec, rng)
        if not math.isfinite(final_loss):
            log.warning("training diverged for %s: final loss %r", spec.name, final_loss)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{spec.name}.json")
    export_weights(model, path)
    return path


def mse_on_grid(model, target_fn, domain, n: int = 1000) -> float:
    """Mean squared error against the target on a uniform evaluation grid."""
    d = len(domain)
    per_axis = max(2, round(n ** (1.0 / d)))
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in domain]
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.stack([m.ravel() for m in mesh], axis=1)
    with torch.no_grad():
        pred = model(torch.as_tensor(X)).numpy()[:, 0]
    return float(np.mean((pred - target_fn(X)) ** 2))
