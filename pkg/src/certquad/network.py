"""Feedforward networks: loading, point evaluation, activation enclosures.

A network here is a plain container of weight matrices and bias vectors
with a single activation kind applied at every hidden layer. Point paths
(``forward`` and the batch derivative evaluators) run in ordinary double
arithmetic; the interval paths live in the enclosure module and consume
``act_enclosure`` from here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    ParseError,
    ShapeMismatch,
    UnsupportedActivation,
    UnsupportedDerivativeOrder,
)
from .interval import Interval, RoundingPolicy, current_policy


class ActivationKind(Enum):
    RELU = "relu"
    TANH = "tanh"
    SIGMOID = "sigmoid"

    @property
    def smooth(self) -> bool:
        """True when first and second derivatives exist everywhere."""
        return self is not ActivationKind.RELU


@dataclass(frozen=True)
class Network:
    """Weights, biases, and the activation kind of a feedforward network.

    ``weights[k]`` maps layer k activations to layer k+1 pre-activations,
    so a network with L hidden layers carries L+1 weight matrices. The
    final affine map has no activation after it.
    """

    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    activation: ActivationKind

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ShapeMismatch(
                f"need equally many weights and biases, at least one each; "
                f"got {len(self.weights)} and {len(self.biases)}"
            )
        for k, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.ndim != 2 or b.ndim != 1 or W.shape[0] != b.shape[0]:
                raise ShapeMismatch(
                    f"layer {k}: weight {W.shape} incompatible with bias {b.shape}"
                )
            if k > 0 and W.shape[1] != self.weights[k - 1].shape[0]:
                raise ShapeMismatch(
                    f"layer {k}: expects {W.shape[1]} inputs but layer {k - 1} "
                    f"produces {self.weights[k - 1].shape[0]}"
                )
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise ShapeMismatch(f"layer {k}: parameters must be finite")

    @property
    def depth(self) -> int:
        """Number of hidden layers."""
        return len(self.weights) - 1

    @property
    def widths(self) -> tuple[int, ...]:
        """Layer widths from input to output, length depth + 2."""
        return (self.weights[0].shape[1],) + tuple(W.shape[0] for W in self.weights)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.weights[-1].shape[0]


@dataclass(frozen=True)
class ForwardTrace:
    """Per-layer record of one forward pass.

    ``preactivations[k]`` is the input to the activation at hidden layer
    k+1 (the last entry is the network output, which no activation sees);
    ``activations[k]`` is the layer-k activation vector, starting with the
    input itself.
    """

    preactivations: tuple[np.ndarray, ...]
    activations: tuple[np.ndarray, ...]

    @property
    def output(self) -> np.ndarray:
        return self.preactivations[-1]


def load_network(path) -> Network:
    """Read a network from the weight-file JSON format.

    The document is an object with an ``activation`` name and a ``layers``
    array of ``{"weight": [[...]], "bias": [...]}`` objects, weight rows
    ordered output-major.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read weight file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"weight file {path} is not valid JSON: {exc}") from exc
    return network_from_dict(doc, where=str(path))


def network_from_dict(doc: dict, where: str = "<dict>") -> Network:
    if not isinstance(doc, dict) or "activation" not in doc or "layers" not in doc:
        raise ParseError(f"{where}: expected an object with 'activation' and 'layers'")
    try:
        kind = ActivationKind(doc["activation"])
    except ValueError:
        raise UnsupportedActivation(
            f"{where}: unknown activation {doc['activation']!r}; "
            f"supported: {[k.value for k in ActivationKind]}"
        ) from None
    layers = doc["layers"]
    if not isinstance(layers, list) or not layers:
        raise ParseError(f"{where}: 'layers' must be a non-empty array")
    weights = []
    biases = []
    for k, layer in enumerate(layers):
        if not isinstance(layer, dict) or "weight" not in layer or "bias" not in layer:
            raise ParseError(f"{where}: layer {k} must have 'weight' and 'bias'")
        try:
            W = np.asarray(layer["weight"], dtype=np.float64)
            b = np.asarray(layer["bias"], dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{where}: layer {k} is not numeric: {exc}") from exc
        if W.ndim != 2 or b.ndim != 1:
            raise ShapeMismatch(
                f"{where}: layer {k} weight must be a matrix and bias a vector, "
                f"got shapes {W.shape} and {b.shape}"
            )
        weights.append(W)
        biases.append(b)
    try:
        return Network(tuple(weights), tuple(biases), kind)
    except ShapeMismatch as exc:
        raise ShapeMismatch(f"{where}: {exc}") from None


def forward(net: Network, x) -> ForwardTrace:
    """One forward pass in double arithmetic, recording every layer."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (net.input_dim,):
        raise DimensionMismatch(
            f"input has shape {x.shape}, network expects ({net.input_dim},)"
        )
    pre = []
    act = [x]
    a = x
    for k in range(net.depth):
        z = net.weights[k] @ a + net.biases[k]
        pre.append(z)
        a = act_values(net.activation, z)
        act.append(a)
    pre.append(net.weights[-1] @ a + net.biases[-1])
    return ForwardTrace(tuple(pre), tuple(act))


# ---------------------------------------------------------------------------
# Pointwise activation values and derivatives (vectorised over arrays).
# ---------------------------------------------------------------------------


def act_values(kind: ActivationKind, z: np.ndarray) -> np.ndarray:
    if kind is ActivationKind.RELU:
        return np.maximum(z, 0.0)
    if kind is ActivationKind.TANH:
        return np.tanh(z)
    s = _sigmoid(z)
    return s


def act_deriv1(kind: ActivationKind, z: np.ndarray) -> np.ndarray:
    if kind is ActivationKind.TANH:
        t = np.tanh(z)
        return 1.0 - t * t
    if kind is ActivationKind.SIGMOID:
        s = _sigmoid(z)
        return s * (1.0 - s)
    raise UnsupportedDerivativeOrder("relu has no derivative usable on this path")


def act_deriv2(kind: ActivationKind, z: np.ndarray) -> np.ndarray:
    if kind is ActivationKind.TANH:
        t = np.tanh(z)
        return -2.0 * t * (1.0 - t * t)
    if kind is ActivationKind.SIGMOID:
        s = _sigmoid(z)
        return s * (1.0 - s) * (1.0 - 2.0 * s)
    raise UnsupportedDerivativeOrder("relu has no second derivative")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # stable in both tails
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


# ---------------------------------------------------------------------------
# Interval enclosures of activations and their first two derivatives.
#
# Each (kind, order) pair is piecewise monotone between tabulated critical
# points, so the exact range over [lo, hi] is the min/max of the function
# over both endpoints plus the critical points falling inside. Outward
# mode widens by two ulps per endpoint (libm results are faithful, not
# correctly rounded) and clamps to the known global range.
# ---------------------------------------------------------------------------

_INF = math.inf

# abscissas where d/dx of the enclosed function vanishes
_ARCTANH_INV_SQRT3 = math.atanh(1.0 / math.sqrt(3.0))
_LN_2_PLUS_SQRT3 = math.log(2.0 + math.sqrt(3.0))

# global sup of |f| over the real line, nudged up so clamping stays sound
_TANH_D2_SUP = math.nextafter(4.0 / (3.0 * math.sqrt(3.0)), _INF)
_SIGM_D2_SUP = math.nextafter(1.0 / (6.0 * math.sqrt(3.0)), _INF)

# Absolute outward pad for activation-derivative formulas. The formulas
# (e.g. 1 - tanh(x)**2) cancel, so their error is a few ulps of 1 in
# absolute terms rather than of the result; every enclosed value has
# magnitude <= 1, so 32 ulps of 1 covers all six kind/order formulas.
_ACT_PAD = 2.0**-48

# sup of the NEXT derivative, used as a Lipschitz constant of the enclosed
# function by the Hölder machinery; exact rationals where available
DERIV_SUP = {
    (ActivationKind.TANH, 0): 1.0,
    (ActivationKind.TANH, 1): _TANH_D2_SUP,
    (ActivationKind.TANH, 2): 2.0,
    (ActivationKind.SIGMOID, 0): 0.25,
    (ActivationKind.SIGMOID, 1): _SIGM_D2_SUP,
    (ActivationKind.SIGMOID, 2): 0.125,
}


def _scalar_act(kind: ActivationKind, order: int, x: float) -> float:
    z = np.asarray([x])
    if order == 0:
        return float(act_values(kind, z)[0])
    if order == 1:
        return float(act_deriv1(kind, z)[0])
    return float(act_deriv2(kind, z)[0])


_CRITICAL = {
    (ActivationKind.TANH, 0): (),
    (ActivationKind.TANH, 1): (0.0,),
    (ActivationKind.TANH, 2): (-_ARCTANH_INV_SQRT3, 0.0, _ARCTANH_INV_SQRT3),
    (ActivationKind.SIGMOID, 0): (),
    (ActivationKind.SIGMOID, 1): (0.0,),
    (ActivationKind.SIGMOID, 2): (-_LN_2_PLUS_SQRT3, 0.0, _LN_2_PLUS_SQRT3),
}

_RANGE_CLAMP = {
    (ActivationKind.TANH, 0): (-1.0, 1.0),
    (ActivationKind.TANH, 1): (0.0, 1.0),
    (ActivationKind.TANH, 2): (-_TANH_D2_SUP, _TANH_D2_SUP),
    (ActivationKind.SIGMOID, 0): (0.0, 1.0),
    (ActivationKind.SIGMOID, 1): (0.0, 0.25),
    (ActivationKind.SIGMOID, 2): (-_SIGM_D2_SUP, _SIGM_D2_SUP),
}


def act_enclosure(kind: ActivationKind, order: int, X: Interval) -> Interval:
    """Exact range of the activation's order-th derivative over X.

    For relu only order 0 is available; smooth kinds support orders 0..2.
    """
    if order not in (0, 1, 2):
        raise UnsupportedDerivativeOrder(f"derivative order {order} not supported")
    if kind is ActivationKind.RELU:
        if order != 0:
            raise UnsupportedDerivativeOrder(
                "relu enclosures exist for function values only; "
                "first and second derivative paths need tanh or sigmoid"
            )
        return Interval(max(X.lo, 0.0), max(X.hi, 0.0))

    candidates = [_scalar_act(kind, order, X.lo), _scalar_act(kind, order, X.hi)]
    for c in _CRITICAL[(kind, order)]:
        if X.lo < c < X.hi:
            candidates.append(_scalar_act(kind, order, c))
    lo = min(candidates)
    hi = max(candidates)
    clamp_lo, clamp_hi = _RANGE_CLAMP[(kind, order)]
    if current_policy() is RoundingPolicy.OUTWARD:
        lo -= _ACT_PAD
        hi += _ACT_PAD
    return Interval(max(lo, clamp_lo), min(hi, clamp_hi))


def act_enclosure_arrays(
    kind: ActivationKind, order: int, zlo: np.ndarray, zhi: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``act_enclosure`` over parallel endpoint arrays."""
    if kind is ActivationKind.RELU:
        if order != 0:
            raise UnsupportedDerivativeOrder(
                "relu enclosures exist for function values only"
            )
        return np.maximum(zlo, 0.0), np.maximum(zhi, 0.0)
    if order == 0:
        f = act_values
    elif order == 1:
        f = act_deriv1
    elif order == 2:
        f = act_deriv2
    else:
        raise UnsupportedDerivativeOrder(f"derivative order {order} not supported")
    vals = [f(kind, zlo), f(kind, zhi)]
    for c in _CRITICAL[(kind, order)]:
        inside = (zlo < c) & (c < zhi)
        if np.any(inside):
            v = np.where(inside, f(kind, np.full_like(zlo, c)), vals[0])
            vals.append(v)
    st = np.stack(vals)
    lo = st.min(axis=0)
    hi = st.max(axis=0)
    clamp_lo, clamp_hi = _RANGE_CLAMP[(kind, order)]
    if current_policy() is RoundingPolicy.OUTWARD:
        lo = lo - _ACT_PAD
        hi = hi + _ACT_PAD
    return np.maximum(lo, clamp_lo), np.minimum(hi, clamp_hi)


# ---------------------------------------------------------------------------
# Batch point oracles: values, Jacobians, and Hessians at many points via
# forward-mode recursions. These are the reference evaluators used by the
# quadrature point path and by sampling audits.
# ---------------------------------------------------------------------------


def forward_batch(net: Network, X: np.ndarray) -> np.ndarray:
    """Network outputs at a batch of points; X is (n, d_in) -> (n, d_out)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != net.input_dim:
        raise DimensionMismatch(f"batch shape {X.shape} does not match input dim {net.input_dim}")
    a = X
    for k in range(net.depth):
        a = act_values(net.activation, a @ net.weights[k].T + net.biases[k])
    return a @ net.weights[-1].T + net.biases[-1]


def derivatives_batch(
    net: Network, X: np.ndarray, order: int = 2
) -> tuple[np.ndarray, np.ndarray | None, np.ndarray | None]:
    """Values, Jacobians, Hessians at a batch of points by forward mode.

    Args:
        net: the network; must be smooth when order >= 1.
        X: points, shape (n, d_in).
        order: highest derivative to compute (0, 1, or 2).

    Returns:
        (values, jacobians, hessians) with shapes (n, d_out),
        (n, d_out, d_in), (n, d_out, d_in, d_in); entries beyond ``order``
        are None.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != net.input_dim:
        raise DimensionMismatch(f"batch shape {X.shape} does not match input dim {net.input_dim}")
    if order >= 1 and not net.activation.smooth:
        raise UnsupportedDerivativeOrder("derivative batches need a smooth activation")
    n, d0 = X.shape
    a = X
    J = np.broadcast_to(np.eye(d0), (n, d0, d0)).copy() if order >= 1 else None
    H = np.zeros((n, d0, d0, d0)) if order >= 2 else None
    for k in range(net.depth):
        W = net.weights[k]
        z = a @ W.T + net.biases[k]
        if order >= 1:
            Jz = np.einsum("ij,njk->nik", W, J)
        if order >= 2:
            Hz = np.einsum("ij,njab->niab", W, H)
            d2 = act_deriv2(net.activation, z)
            H = (
                d2[:, :, None, None] * Jz[:, :, :, None] * Jz[:, :, None, :]
                + act_deriv1(net.activation, z)[:, :, None, None] * Hz
            )
        if order >= 1:
            J = act_deriv1(net.activation, z)[:, :, None] * Jz
        a = act_values(net.activation, z)
    W = net.weights[-1]
    vals = a @ W.T + net.biases[-1]
    jac = np.einsum("ij,njk->nik", W, J) if order >= 1 else None
    hess = np.einsum("ij,njab->niab", W, H) if order >= 2 else None
    return vals, jac, hess


__all__ = [
    "ActivationKind",
    "Network",
    "ForwardTrace",
    "load_network",
    "network_from_dict",
    "forward",
    "forward_batch",
    "derivatives_batch",
    "act_values",
    "act_deriv1",
    "act_deriv2",
    "act_enclosure",
    "act_enclosure_arrays",
    "DERIV_SUP",
]
