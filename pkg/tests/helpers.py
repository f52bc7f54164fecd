"""Network builders shared across test modules."""

import numpy as np

from certquad.network import ActivationKind, Network


def unit_scalar_net(kind=ActivationKind.TANH) -> Network:
    """One hidden neuron, all weights 1, all biases 0."""
    return Network(
        (np.array([[1.0]]), np.array([[1.0]])),
        (np.array([0.0]), np.array([0.0])),
        kind,
    )


def constant_net(c: float, dim: int = 1) -> Network:
    """A network computing the constant c on R^dim."""
    return Network(
        (np.zeros((1, dim)), np.zeros((1, 1))),
        (np.zeros(1), np.array([c])),
        ActivationKind.TANH,
    )


def zero_net(dim: int = 2) -> Network:
    return constant_net(0.0, dim)


def random_net(rng, widths, kind, scale=1.0) -> Network:
    ws = tuple(
        scale * rng.normal(size=(widths[i + 1], widths[i])) / np.sqrt(widths[i])
        for i in range(len(widths) - 1)
    )
    bs = tuple(scale * 0.1 * rng.normal(size=w) for w in widths[1:])
    return Network(ws, bs, kind)


def random_box(rng, dim, center_scale=1.0, width_range=(0.05, 0.6)):
    from certquad import Box

    mid = rng.uniform(-center_scale, center_scale, size=dim)
    half = 0.5 * rng.uniform(*width_range, size=dim)
    return Box(mid - half, mid + half)
