"""Weight export to, and reimport from, the portable JSON format."""

from __future__ import annotations

import json

import torch
from torch import nn

from .models import ACTIVATIONS


class UnsupportedLayer(Exception):
    """The model contains a module the dense weight format cannot express."""


def _walk(model: nn.Module) -> tuple[str, list[nn.Linear]]:
    linears: list[nn.Linear] = []
    activation = None
    for module in model.children():
        if isinstance(module, nn.Sequential):
            inner_act, inner = _walk(module)
            linears.extend(inner)
            if inner_act is not None:
                activation = _merge_activation(activation, inner_act)
            continue
        if isinstance(module, nn.Linear):
            linears.append(module)
            continue
        matched = None
        for name, cls in ACTIVATIONS.items():
            if isinstance(module, cls):
                matched = name
                break
        if matched is None:
            raise UnsupportedLayer(
                f"only dense layers with tanh/relu activations export; got {type(module).__name__}"
            )
        activation = _merge_activation(activation, matched)
    return activation, linears


def _merge_activation(seen: str | None, new: str) -> str:
    if seen is not None and seen != new:
        raise UnsupportedLayer(f"mixed activations {seen} and {new} cannot be exported")
    return new


def export_weights(model: nn.Module, path) -> None:
    """Write a plain MLP as a weight JSON file the certifier can load.

    Args:
        model: Linear layers optionally interleaved with one activation
            kind (tanh or relu), possibly nested in Sequential containers.
        path: output file path.

    Raises:
        UnsupportedLayer: any other module type, or mixed activations.
    """
    activation, linears = _walk(model)
    if not linears:
        raise UnsupportedLayer("model has no dense layers")
    if activation is None:
        activation = "tanh"
    doc = {
        "activation": activation,
        "layers": [
            {
                "weight": layer.weight.detach().to(torch.float64).numpy().tolist(),
                "bias": layer.bias.detach().to(torch.float64).numpy().tolist(),
            }
            for layer in linears
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def import_weights(path) -> nn.Sequential:
    """Rebuild a torch module from a weight JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    act = ACTIVATIONS[doc["activation"]]
    modules: list[nn.Module] = []
    layers = doc["layers"]
    for i, layer in enumerate(layers):
        W = torch.tensor(layer["weight"], dtype=torch.float64)
        b = torch.tensor(layer["bias"], dtype=torch.float64)
        lin = nn.Linear(W.shape[1], W.shape[0], dtype=torch.float64)
        with torch.no_grad():
            lin.weight.copy_(W)
            lin.bias.copy_(b)
        modules.append(lin)
        if i < len(layers) - 1:
            modules.append(act())
    return nn.Sequential(*modules)
