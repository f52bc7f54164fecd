"""Reference oracle behaviour: exact cases and MC/grid self-consistency."""

import math

import numpy as np
import pytest
import torch
from torch import nn

from exporter import build_mlp, reference_norm, reference_residual
from exporter.targets import GAUSSIAN_DOMAIN


def constant_model(c: float, dim: int = 1) -> nn.Sequential:
    lin = nn.Linear(dim, 1, dtype=torch.float64)
    with torch.no_grad():
        lin.weight.zero_()
        lin.bias.fill_(c)
    return nn.Sequential(lin)


class TestExactCases:
    def test_constant_model_zero_variance(self):
        ref = reference_norm(constant_model(1.5), ((0.0, 2.0),), 0, 2.0,
                             samples=500, seed=0)
        assert ref["estimate"] == 1.5**2 * 2.0
        assert ref["stderr"] == 0.0

    def test_constant_model_grid(self):
        ref = reference_norm(constant_model(-0.5, dim=2),
                             ((0.0, 1.0), (0.0, 3.0)), 0, 3.0,
                             method="grid", samples=400)
        assert ref["estimate"] == pytest.approx(0.125 * 3.0, rel=1e-15)
        assert ref["stderr"] == 0.0
        assert ref["method"] == "grid"

    def test_linear_model_first_order(self):
        # u = 2x on [0,1]: integral of u^2 is 4/3, of (u')^2 is 4
        lin = nn.Linear(1, 1, dtype=torch.float64)
        with torch.no_grad():
            lin.weight.fill_(2.0)
            lin.bias.zero_()
        ref = reference_norm(nn.Sequential(lin), ((0.0, 1.0),), 1, 2.0,
                             method="grid", samples=200_000)
        assert ref["estimate"] == pytest.approx(4.0 / 3.0 + 4.0, rel=1e-9)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            reference_norm(constant_model(1.0), ((0.0, 1.0),), 3, 2.0)
        with pytest.raises(ValueError):
            reference_norm(constant_model(1.0), ((0.0, 1.0),), 0, 2.0, method="quad")


class TestSelfConsistency:
    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_mc_agrees_with_fine_grid(self, k):
        model = build_mlp(1, (24,), "tanh", seed=7)
        mc = reference_norm(model, GAUSSIAN_DOMAIN, k, 2.0,
                            method="mc", samples=50_000, seed=11)
        grid = reference_norm(model, GAUSSIAN_DOMAIN, k, 2.0,
                              method="grid", samples=1_000_000)
        assert abs(mc["estimate"] - grid["estimate"]) <= 3.0 * mc["stderr"]

    def test_seeded_estimates_reproduce(self):
        model = build_mlp(1, (16,), "tanh", seed=3)
        a = reference_norm(model, GAUSSIAN_DOMAIN, 0, 2.0, samples=2000, seed=5)
        b = reference_norm(model, GAUSSIAN_DOMAIN, 0, 2.0, samples=2000, seed=5)
        assert a == b


class TestResidual:
    def test_exact_solution_model_has_tiny_residual(self):
        # hand-built net computing tanh(x1 + x2 - 1) exactly: its Laplace
        # residual against the matching source is zero up to roundoff
        lin1 = nn.Linear(2, 1, dtype=torch.float64)
        lin2 = nn.Linear(1, 1, dtype=torch.float64)
        with torch.no_grad():
            lin1.weight.copy_(torch.tensor([[1.0, 1.0]], dtype=torch.float64))
            lin1.bias.fill_(-1.0)
            lin2.weight.fill_(1.0)
            lin2.bias.zero_()
        model = nn.Sequential(lin1, nn.Tanh(), lin2)

        from exporter.targets import PINN_DOMAIN, pinn_source

        ref = reference_residual(model, PINN_DOMAIN, pinn_source, p=2.0,
                                 samples=5000, seed=1)
        assert ref["estimate"] <= 1e-28

    def test_constant_model_residual_is_source_power(self):
        # u identically 0: residual power integral equals that of the source
        from exporter.targets import PINN_DOMAIN, pinn_source

        ref = reference_residual(constant_model(0.0, dim=2), PINN_DOMAIN,
                                 pinn_source, p=2.0, samples=40_000, seed=2)
        rng = np.random.default_rng(3)
        X = rng.uniform(0.0, 1.0, size=(200_000, 2))
        brute = float(np.mean(pinn_source(X) ** 2))
        se = float(np.std(pinn_source(X) ** 2, ddof=1)) / math.sqrt(X.shape[0])
        assert abs(ref["estimate"] - brute) <= 3.0 * (ref["stderr"] + se)
