"""Experiment descriptions and plain MLP construction."""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

from .targets import TARGETS

ARCHITECTURES = {"deep": (32, 32, 32), "wide": (200,)}
ACTIVATIONS = {"tanh": nn.Tanh, "relu": nn.ReLU}

_TARGET_NAMES = tuple(TARGETS) + ("random_init",)


@dataclass(frozen=True)
class ExperimentSpec:
    """One training run: what to fit, with which net, and how long.

    Args:
        target: gaussian_peak, smooth_disc, pinn_tanh, or random_init
            (random_init skips training and exports the seeded init).
        architecture: deep (three hidden layers of 32) or wide (one
            hidden layer of 200).
        activation: tanh or relu.
        epochs: full-batch optimizer steps.
        learning_rate: Adam step size.
        weight_decay: Adam weight decay; zero unless an experiment
            states otherwise.
        seed: controls the init and the sampled training data.
    """

    target: str
    architecture: str = "deep"
    activation: str = "tanh"
    epochs: int = 2000
    learning_rate: float = 1e-3
    weight_decay: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.target not in _TARGET_NAMES:
            raise ValueError(f"target must be one of {_TARGET_NAMES}, got {self.target!r}")
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"architecture must be deep or wide, got {self.architecture!r}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be tanh or relu, got {self.activation!r}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.weight_decay < 0:
            raise ValueError(f"weight_decay must be >= 0, got {self.weight_decay}")

    @property
    def input_dim(self) -> int:
        return 1 if self.target == "gaussian_peak" else 2

    @property
    def hidden(self) -> tuple[int, ...]:
        return ARCHITECTURES[self.architecture]

    @property
    def name(self) -> str:
        return f"{self.target}_{self.architecture}_{self.activation}_seed{self.seed}"


def build_mlp(input_dim: int, hidden: tuple[int, ...], activation: str,
              seed: int, output_dim: int = 1) -> nn.Sequential:
    """Seeded double-precision MLP of dense layers with one activation kind.

    Args:
        input_dim: number of input features.
        hidden: widths of the hidden layers, in order.
        activation: tanh or relu.
        seed: passed to torch.manual_seed before the layers are created,
            so equal seeds give bitwise-equal inits.
        output_dim: number of outputs.

    Returns:
        An nn.Sequential of Linear layers interleaved with the activation.
    """
    if activation not in ACTIVATIONS:
        raise ValueError(f"activation must be tanh or relu, got {activation!r}")
    torch.manual_seed(seed)
    act = ACTIVATIONS[activation]
    dims = (input_dim, *hidden, output_dim)
    layers: list[nn.Module] = []
    for i in range(len(dims) - 1):
        layers.append(nn.Linear(dims[i], dims[i + 1], dtype=torch.float64))
        if i < len(dims) - 2:
            layers.append(act())
    return nn.Sequential(*layers)


def model_for(spec: ExperimentSpec) -> nn.Sequential:
    return build_mlp(spec.input_dim, spec.hidden, spec.activation, spec.seed)
