"""Interval enclosures of network values, derivatives, and derived integrands.

Three recursions do the real work. The forward pass propagates an input box
through the layers to enclose pre-activations. The backward Jacobian pass
alternates column scaling by the first-derivative enclosure with exact
point-matrix products. The backward Hessian pass sandwiches the running
matrix between derivative scalings and adds a curvature term, one output
component at a time. Everything downstream (Sobolev integrands, elliptic
residuals, Hölder constants) is assembled from these three.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    CoefficientEnclosureError,
    DimensionMismatch,
    IndexOutOfRange,
    UnsupportedActivation,
    UnsupportedDerivativeOrder,
)
from .interval import (
    Box,
    Interval,
    IntervalMatrix,
    iv_add,
    iv_affine,
    iv_matmul_point_left,
    iv_matmul_point_right,
    iv_mul,
    iv_quadform,
)
from .network import (
    DERIV_SUP,
    ActivationKind,
    Network,
    act_enclosure_arrays,
    derivatives_batch,
    forward,
    forward_batch,
)


@dataclass(frozen=True)
class HoelderParams:
    """Constant C and exponent gamma of a width bound w(F(K)) <= C*w(K)**gamma."""

    C: float
    gamma: float

    def __post_init__(self):
        if not (self.C > 0 and math.isfinite(self.C)):
            raise ValueError(f"Hölder constant must be positive and finite, got {self.C!r}")
        if not (0 < self.gamma <= 1):
            raise ValueError(f"Hölder exponent must lie in (0, 1], got {self.gamma!r}")


def _check_box(net: Network, K: Box) -> None:
    if K.dim != net.input_dim:
        raise DimensionMismatch(f"box has {K.dim} axes, network takes {net.input_dim} inputs")


def _require_smooth(net: Network, what: str) -> None:
    if not net.activation.smooth:
        raise UnsupportedDerivativeOrder(
            f"{what} needs a twice-differentiable activation; relu supports value enclosures only"
        )


def _interval_trace(net: Network, K: Box, upto: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Endpoint arrays of the pre-activation enclosures for layers 1..upto."""
    xlo, xhi = K.lo, K.hi
    out = []
    for k in range(upto):
        zlo, zhi = iv_affine(net.weights[k], net.biases[k], xlo, xhi)
        out.append((zlo, zhi))
        if k + 1 < upto:
            xlo, xhi = act_enclosure_arrays(net.activation, 0, zlo, zhi)
    return out


def fval(net: Network, ell: int, K: Box) -> Box:
    """Enclosure of the layer-ell pre-activations over K.

    Layer numbering follows the forward recursion: ell = 1 is the first
    affine image of the input, ell = depth + 1 is the network output. The
    returned box contains z_ell(x) for every x in K.
    """
    _check_box(net, K)
    if not 1 <= ell <= net.depth + 1:
        raise IndexOutOfRange(f"fval layer must be in 1..{net.depth + 1}, got {ell}")
    zlo, zhi = _interval_trace(net, K, ell)[-1]
    return Box(zlo, zhi)


def jac(net: Network, ell: int, K: Box) -> IntervalMatrix:
    """Enclosure of the Jacobian of the tail map from layer ell onward.

    Rows index network outputs, columns index layer-ell coordinates; the
    result contains the Jacobian of the tail network at x_ell(x) for every
    x in K. ell = 0 gives the Jacobian of the whole network over K.
    """
    _check_box(net, K)
    _require_smooth(net, "jac")
    L = net.depth
    if not 0 <= ell <= L:
        raise IndexOutOfRange(f"jac layer must be in 0..{L}, got {ell}")
    Jlo = np.array(net.weights[L], dtype=np.float64)
    Jhi = Jlo.copy()
    if ell < L:
        trace = _interval_trace(net, K, L)
        for k in range(L - 1, ell - 1, -1):
            zlo, zhi = trace[k]
            slo, shi = act_enclosure_arrays(net.activation, 1, zlo, zhi)
            Blo, Bhi = iv_mul(Jlo, Jhi, slo[None, :], shi[None, :])
            Jlo, Jhi = iv_matmul_point_right(Blo, Bhi, net.weights[k])
    return IntervalMatrix(Jlo, Jhi)


def hess(net: Network, i: int, ell: int, K: Box) -> IntervalMatrix:
    """Enclosure of the Hessian of output component i of the tail map.

    The component index is 0-based. The result is a square interval matrix
    over layer-ell coordinates containing the Hessian of the i-th output
    of the tail network at x_ell(x) for every x in K.
    """
    _check_box(net, K)
    _require_smooth(net, "hess")
    L = net.depth
    if not 0 <= i < net.output_dim:
        raise IndexOutOfRange(f"output component must be in 0..{net.output_dim - 1}, got {i}")
    if not 0 <= ell <= L:
        raise IndexOutOfRange(f"hess layer must be in 0..{L}, got {ell}")
    d_last = net.weights[L].shape[1]
    Hlo = np.zeros((d_last, d_last))
    Hhi = np.zeros((d_last, d_last))
    jlo = np.array(net.weights[L][i], dtype=np.float64)
    jhi = jlo.copy()
    if ell < L:
        trace = _interval_trace(net, K, L)
        for k in range(L - 1, ell - 1, -1):
            zlo, zhi = trace[k]
            slo, shi = act_enclosure_arrays(net.activation, 1, zlo, zhi)
            qlo, qhi = act_enclosure_arrays(net.activation, 2, zlo, zhi)
            W = net.weights[k]
            # curvature term: W^T diag(sigma'' ⊙ J_i) W
            ulo, uhi = iv_mul(qlo, qhi, jlo, jhi)
            t2lo, t2hi = iv_quadform(W, ulo, uhi)
            # sandwich term: W^T diag(sigma') H diag(sigma') W
            Mlo, Mhi = iv_mul(Hlo, Hhi, slo[:, None], shi[:, None])
            Mlo, Mhi = iv_mul(Mlo, Mhi, slo[None, :], shi[None, :])
            Mlo, Mhi = iv_matmul_point_left(W.T, Mlo, Mhi)
            Mlo, Mhi = iv_matmul_point_right(Mlo, Mhi, W)
            Hlo, Hhi = iv_add(Mlo, Mhi, t2lo, t2hi)
            # carry the Jacobian row down one layer
            rlo, rhi = iv_mul(jlo, jhi, slo, shi)
            rlo, rhi = iv_matmul_point_right(rlo[None, :], rhi[None, :], W)
            jlo, jhi = rlo[0], rhi[0]
    return IntervalMatrix(Hlo, Hhi)


# ---------------------------------------------------------------------------
# Sobolev-norm integrands: f(x) = sum over outputs and multi-indices up to
# order k of |derivative|**p. Mixed second derivatives enter once each, so
# the |alpha| = 2 terms run over the upper triangle of the Hessian.
# ---------------------------------------------------------------------------


def _check_order_p(net: Network, k: int, p: float) -> None:
    if k not in (0, 1, 2):
        raise UnsupportedDerivativeOrder(f"Sobolev order must be 0, 1, or 2, got {k}")
    if k >= 1:
        _require_smooth(net, f"order-{k} Sobolev integrand")
    if not p >= 1:
        raise ValueError(f"exponent p must be >= 1, got {p}")


def sobolev_integrand_point(net: Network, k: int, p: float, x) -> float:
    """Value at x of the integrand whose integral is the W^{k,p} norm^p."""
    return float(sobolev_integrand_batch(net, k, p, np.asarray(x, dtype=np.float64)[None, :])[0])


def sobolev_integrand_batch(net: Network, k: int, p: float, X: np.ndarray) -> np.ndarray:
    """Vectorised ``sobolev_integrand_point`` over rows of X."""
    _check_order_p(net, k, p)
    vals, J, H = derivatives_batch(net, X, order=k)
    total = np.abs(vals) ** p
    out = total.sum(axis=1)
    if k >= 1:
        out = out + (np.abs(J) ** p).sum(axis=(1, 2))
    if k == 2:
        d = net.input_dim
        iu = np.triu_indices(d)
        out = out + (np.abs(H[:, :, iu[0], iu[1]]) ** p).sum(axis=(1, 2))
    return out


def sobolev_integrand_enclosure(net: Network, k: int, p: float, K: Box) -> Interval:
    """Interval containing the Sobolev integrand everywhere on K."""
    _check_order_p(net, k, p)
    F = fval(net, net.depth + 1, K)
    total = Interval(0.0)
    for i in range(net.output_dim):
        total = total + F.axis(i).abs_pow(p)
    if k >= 1:
        J = jac(net, 0, K)
        for i in range(net.output_dim):
            for j in range(net.input_dim):
                total = total + J.entry(i, j).abs_pow(p)
    if k == 2:
        d = net.input_dim
        for i in range(net.output_dim):
            Hi = hess(net, i, 0, K)
            for a in range(d):
                for b in range(a, d):
                    total = total + Hi.entry(a, b).abs_pow(p)
    return total


# ---------------------------------------------------------------------------
# ReLU activation patterns and the affine-piece test.
# ---------------------------------------------------------------------------


def activation_pattern(net: Network, x) -> tuple[tuple[int, ...], ...]:
    """Signs of the hidden pre-activations at x, one tuple per hidden layer."""
    if net.activation is not ActivationKind.RELU:
        raise UnsupportedActivation("activation patterns are defined for relu networks")
    tr = forward(net, x)
    return tuple(
        tuple(int(s) for s in np.sign(z)) for z in tr.preactivations[:-1]
    )


def affine_on_box(net: Network, K: Box, cap: int | None = None) -> bool:
    """Sufficient test that the network is one affine map on all of K.

    True when every vertex of K produces the same activation pattern;
    false makes no claim either way. A vertex that lands exactly on a
    neuron's switching hyperplane yields a 0 entry and therefore fails
    the equality test against active or inactive vertices, which errs on
    the conservative side.
    """
    if net.activation is not ActivationKind.RELU:
        raise UnsupportedActivation("the affine-piece test is defined for relu networks")
    _check_box(net, K)
    verts = K.vertices() if cap is None else K.vertices(cap)
    a = verts
    signs = []
    for k in range(net.depth):
        z = a @ net.weights[k].T + net.biases[k]
        signs.append(np.sign(z))
        a = np.maximum(z, 0.0)
    first = [s[0] for s in signs]
    return all(bool(np.all(s == f[None, :])) for s, f in zip(signs, first))


# ---------------------------------------------------------------------------
# Elliptic operators in nondivergence form and residual integrands.
# ---------------------------------------------------------------------------


class _Coefficient:
    """Uniform wrapper over the admitted coefficient descriptor forms."""

    def __init__(self, spec, name: str):
        self.name = name
        if isinstance(spec, (int, float)):
            v = float(spec)
            self._point = lambda X: np.full(X.shape[0], v)
            self._box = lambda K: Interval(v)
        elif hasattr(spec, "point") and hasattr(spec, "box"):
            self._point = spec.point
            self._box = spec.box
        elif isinstance(spec, tuple) and len(spec) == 2 and all(callable(f) for f in spec):
            self._point, self._box = spec
        else:
            raise CoefficientEnclosureError(
                f"coefficient {name}: expected a number, an expression, or a "
                f"(point evaluator, box enclosure) pair, got {type(spec).__name__}"
            )

    def point(self, X: np.ndarray) -> np.ndarray:
        try:
            out = np.asarray(self._point(X), dtype=np.float64)
        except CoefficientEnclosureError:
            raise
        except Exception as exc:
            raise CoefficientEnclosureError(f"coefficient {self.name}: {exc}") from exc
        if out.shape != (X.shape[0],):
            out = np.broadcast_to(out, (X.shape[0],)).astype(np.float64)
        return out

    def box(self, K: Box) -> Interval:
        try:
            out = self._box(K)
        except CoefficientEnclosureError:
            raise
        except Exception as exc:
            raise CoefficientEnclosureError(f"coefficient {self.name}: {exc}") from exc
        if not isinstance(out, Interval):
            raise CoefficientEnclosureError(
                f"coefficient {self.name}: box enclosure returned {type(out).__name__}"
            )
        return out


class EllipticOperator:
    """A second-order operator -sum a_ij d_ij + sum b_i d_i + c, with data g.

    Each coefficient is a constant, an expression object exposing ``point``
    and ``box`` evaluators, or a raw (point evaluator, box enclosure) pair.
    ``a`` is a d-by-d nested sequence, ``b`` a length-d sequence; ``c`` and
    ``g`` are scalar coefficients.
    """

    def __init__(self, dim: int, a, b, c, g):
        self.dim = dim
        a = list(a)
        b = list(b)
        if len(a) != dim or any(len(row) != dim for row in a):
            raise DimensionMismatch(f"second-order coefficients must form a {dim}x{dim} grid")
        if len(b) != dim:
            raise DimensionMismatch(f"first-order coefficients must have length {dim}")
        self.a = [
            [_Coefficient(a[i][j], f"a[{i}][{j}]") for j in range(dim)] for i in range(dim)
        ]
        self.b = [_Coefficient(b[i], f"b[{i}]") for i in range(dim)]
        self.c = _Coefficient(c, "c")
        self.g = _Coefficient(g, "g")

    @classmethod
    def laplacian(cls, dim: int, g=0.0, sign: float = 1.0) -> "EllipticOperator":
        """-sign * Laplace operator with source g (sign=-1 gives +Laplace)."""
        a = [[sign if i == j else 0.0 for j in range(dim)] for i in range(dim)]
        return cls(dim, a, [0.0] * dim, 0.0, g)


def _check_residual_net(net: Network, op: EllipticOperator, p: float) -> None:
    _require_smooth(net, "residual")
    if net.output_dim != 1:
        raise DimensionMismatch(
            f"residuals are defined for scalar-output networks, got {net.output_dim} outputs"
        )
    if net.input_dim != op.dim:
        raise DimensionMismatch(
            f"operator is {op.dim}-dimensional, network takes {net.input_dim} inputs"
        )
    if not p >= 1:
        raise ValueError(f"exponent p must be >= 1, got {p}")


def residual_point(net: Network, op: EllipticOperator, p: float, x) -> float:
    """|Du(x) - g(x)|**p for the network u at one point."""
    return float(residual_batch(net, op, p, np.asarray(x, dtype=np.float64)[None, :])[0])


def residual_batch(net: Network, op: EllipticOperator, p: float, X: np.ndarray) -> np.ndarray:
    """Vectorised residual integrand over rows of X."""
    _check_residual_net(net, op, p)
    vals, J, H = derivatives_batch(net, X, order=2)
    d = op.dim
    acc = op.c.point(X) * vals[:, 0]
    for i in range(d):
        acc = acc + op.b[i].point(X) * J[:, 0, i]
        for j in range(d):
            acc = acc - op.a[i][j].point(X) * H[:, 0, i, j]
    return np.abs(acc - op.g.point(X)) ** p


def residual_enclosure(net: Network, op: EllipticOperator, p: float, K: Box) -> Interval:
    """Interval containing the residual integrand everywhere on K."""
    _check_residual_net(net, op, p)
    F = fval(net, net.depth + 1, K)
    J = jac(net, 0, K)
    H = hess(net, 0, 0, K)
    d = op.dim
    acc = op.c.box(K) * F.axis(0)
    for i in range(d):
        acc = acc + op.b[i].box(K) * J.entry(0, i)
        for j in range(d):
            acc = acc - op.a[i][j].box(K) * H.entry(i, j)
    return (acc - op.g.box(K)).abs_pow(p)


# ---------------------------------------------------------------------------
# Hölder parameters. For every smooth activation the maps built above are
# Lipschitz in the box (gamma = 1); the constants chain per-layer operator
# norms with derivative-range magnitudes computed once on the reference
# domain, so they are valid for every sub-box of it by isotonicity.
# ---------------------------------------------------------------------------


def _colsum_norm(W: np.ndarray) -> float:
    """Max column sum of |W|: bounds sums over a column index."""
    if W.size == 0:
        return 0.0
    return float(np.max(np.abs(W).sum(axis=0)))


def _rowsum_norm(W: np.ndarray) -> float:
    if W.size == 0:
        return 0.0
    return float(np.max(np.abs(W).sum(axis=1)))


def _lipschitz_of_activation(kind: ActivationKind) -> float:
    if kind is ActivationKind.RELU:
        return 1.0
    return DERIV_SUP[(kind, 0)]


@dataclass(frozen=True)
class _RangeData:
    """Per-layer magnitudes and width constants gathered on a reference box."""

    cf: list[float]  # cf[m] bounds w(pre-activation enclosure at layer m+1)/w(K)
    cj: list[float]  # cj[k] bounds w(jac at layer k)/w(K)
    ch: list[float]  # ch[k] bounds w(hess at layer k)/w(K), max over outputs
    mag_s1: list[float]  # magnitude of the first-derivative range per hidden layer
    mag_s2: list[float]
    mag_j: list[float]  # max entry magnitude of the Jacobian enclosure per layer
    mag_h: list[float]


def _range_data(net: Network, omega: Box, need_hess: bool) -> _RangeData:
    L = net.depth
    kind = net.activation
    trace = _interval_trace(net, omega, L + 1)
    cf: list[float] = []
    mag_s1: list[float] = [0.0] * L
    mag_s2: list[float] = [0.0] * L
    running = 1.0
    for k in range(L + 1):
        running *= _rowsum_norm(net.weights[k])
        cf.append(running)
        if k < L:
            zlo, zhi = trace[k]
            s1lo, s1hi = act_enclosure_arrays(kind, 1, zlo, zhi)
            mag_s1[k] = float(np.max(np.maximum(np.abs(s1lo), np.abs(s1hi)))) if zlo.size else 0.0
            q2lo, q2hi = act_enclosure_arrays(kind, 2, zlo, zhi)
            mag_s2[k] = float(np.max(np.maximum(np.abs(q2lo), np.abs(q2hi)))) if zlo.size else 0.0
            running *= mag_s1[k]

    # backward pass on omega for Jacobian/Hessian magnitudes and constants
    d3 = DERIV_SUP[(kind, 2)]
    mag_j = [0.0] * (L + 1)
    mag_h = [0.0] * (L + 1)
    cj = [0.0] * (L + 1)
    ch = [0.0] * (L + 1)
    Jlo = np.array(net.weights[L], dtype=np.float64)
    Jhi = Jlo.copy()
    mag_j[L] = float(np.max(np.abs(Jlo))) if Jlo.size else 0.0
    hs = None
    if need_hess:
        hs = [
            (np.zeros((net.weights[L].shape[1],) * 2), np.zeros((net.weights[L].shape[1],) * 2))
            for _ in range(net.output_dim)
        ]
        js = [(net.weights[L][i].copy(), net.weights[L][i].copy()) for i in range(net.output_dim)]
    for k in range(L - 1, -1, -1):
        zlo, zhi = trace[k]
        slo, shi = act_enclosure_arrays(kind, 1, zlo, zhi)
        qlo, qhi = act_enclosure_arrays(kind, 2, zlo, zhi)
        W = net.weights[k]
        col = _colsum_norm(W)
        cj[k] = col * (mag_j[k + 1] * mag_s2[k] * cf[k] + mag_s1[k] * cj[k + 1])
        if need_hess:
            ch[k] = col * col * (
                2.0 * mag_s1[k] * mag_h[k + 1] * mag_s2[k] * cf[k]
                + mag_s1[k] ** 2 * ch[k + 1]
                + mag_s2[k] * cj[k + 1]
                + mag_j[k + 1] * d3 * cf[k]
            )
            new_hs = []
            for i in range(net.output_dim):
                Hlo, Hhi = hs[i]
                jrlo, jrhi = js[i]
                ulo, uhi = iv_mul(qlo, qhi, jrlo, jrhi)
                t2lo, t2hi = iv_quadform(W, ulo, uhi)
                Mlo, Mhi = iv_mul(Hlo, Hhi, slo[:, None], shi[:, None])
                Mlo, Mhi = iv_mul(Mlo, Mhi, slo[None, :], shi[None, :])
                Mlo, Mhi = iv_matmul_point_left(W.T, Mlo, Mhi)
                Mlo, Mhi = iv_matmul_point_right(Mlo, Mhi, W)
                new_hs.append(iv_add(Mlo, Mhi, t2lo, t2hi))
            hs = new_hs
            mag_h[k] = max(
                (float(np.max(np.maximum(np.abs(lo), np.abs(hi)))) for lo, hi in hs),
                default=0.0,
            )
            new_js = []
            for i in range(net.output_dim):
                jrlo, jrhi = js[i]
                rlo, rhi = iv_mul(jrlo, jrhi, slo, shi)
                rlo, rhi = iv_matmul_point_right(rlo[None, :], rhi[None, :], W)
                new_js.append((rlo[0], rhi[0]))
            js = new_js
        Blo, Bhi = iv_mul(Jlo, Jhi, slo[None, :], shi[None, :])
        Jlo, Jhi = iv_matmul_point_right(Blo, Bhi, W)
        mag_j[k] = float(np.max(np.maximum(np.abs(Jlo), np.abs(Jhi)))) if Jlo.size else 0.0
    return _RangeData(cf, cj, ch, mag_s1, mag_s2, mag_j, mag_h)


def enclosure_hoelder_params(net: Network, kind: str, omega: Box) -> HoelderParams:
    """(C, gamma) for the named enclosure map on sub-boxes of omega.

    For ``fval`` the constant is the closed-form product of layer norms
    with the activation's global Lipschitz constant; for ``jac``/``hess``
    it chains the per-layer width inequalities using derivative-range
    magnitudes computed on omega, so tighter domains give smaller C.
    """
    _check_box(net, omega)
    if kind == "fval":
        c_sigma = _lipschitz_of_activation(net.activation)
        C = c_sigma**net.depth
        for W in net.weights:
            C *= _rowsum_norm(W)
        return HoelderParams(max(C, 1e-300), 1.0)
    if kind not in ("jac", "hess"):
        raise ValueError(f"kind must be one of fval, jac, hess; got {kind!r}")
    _require_smooth(net, f"{kind} Hölder parameters")
    data = _range_data(net, omega, need_hess=(kind == "hess"))
    C = data.cj[0] if kind == "jac" else data.ch[0]
    return HoelderParams(max(C, 1e-300), 1.0)


def integrand_hoelder_params(net: Network, k: int, p: float, omega: Box) -> HoelderParams:
    """(C, gamma) for the Sobolev integrand f_{k,p} on sub-boxes of omega.

    Each |term|**p contributes p * M**(p-1) * C_term, where M is the term
    enclosure's magnitude on omega and C_term the term's own width
    constant; the total is the sum over all terms by width subadditivity.
    """
    _check_order_p(net, k, p)
    _check_box(net, omega)
    L = net.depth
    if net.activation.smooth:
        data = _range_data(net, omega, need_hess=(k == 2))
        cf_out = data.cf[L]
        cj0 = data.cj[0]
        ch0 = data.ch[0]
    else:
        cf_out = enclosure_hoelder_params(net, "fval", omega).C
        cj0 = ch0 = 0.0
    C = 0.0
    F = fval(net, L + 1, omega)
    for i in range(net.output_dim):
        M = F.axis(i).mag()
        C += p * M ** (p - 1.0) * cf_out if p > 1 else cf_out
    if k >= 1:
        J = jac(net, 0, omega)
        for i in range(net.output_dim):
            for j in range(net.input_dim):
                M = J.entry(i, j).mag()
                C += p * M ** (p - 1.0) * cj0 if p > 1 else cj0
    if k == 2:
        d = net.input_dim
        for i in range(net.output_dim):
            Hi = hess(net, i, 0, omega)
            for a in range(d):
                for b in range(a, d):
                    M = Hi.entry(a, b).mag()
                    C += p * M ** (p - 1.0) * ch0 if p > 1 else ch0
    return HoelderParams(max(C, 1e-300), 1.0)


def residual_hoelder_params(
    net: Network, op: EllipticOperator, p: float, omega: Box
) -> HoelderParams:
    """(C, gamma) for the residual integrand on sub-boxes of omega.

    Only constant coefficients are admitted: a varying coefficient has no
    certified modulus of continuity here, so a width bound proportional to
    the box width cannot be guaranteed. Residual problems with varying
    coefficients should refine by halving instead.
    """
    _check_residual_net(net, op, p)
    _check_box(net, omega)

    def constant_mag(cf: _Coefficient) -> float:
        iv = cf.box(omega)
        if iv.width() > 0.0:
            raise CoefficientEnclosureError(
                f"coefficient {cf.name} varies over the domain; Hölder parameters "
                f"for residual integrands need constant coefficients "
                f"(halving refinement handles the varying case)"
            )
        return iv.mag()

    data = _range_data(net, omega, need_hess=True)
    F = fval(net, net.depth + 1, omega)
    J = jac(net, 0, omega)
    H = hess(net, 0, 0, omega)
    d = op.dim
    C_D = 0.0
    mag_D = constant_mag(op.g)
    mc = constant_mag(op.c)
    C_D += mc * data.cf[net.depth]
    mag_D += mc * F.axis(0).mag()
    for i in range(d):
        mb = constant_mag(op.b[i])
        C_D += mb * data.cj[0]
        mag_D += mb * J.entry(0, i).mag()
        for j in range(d):
            ma = constant_mag(op.a[i][j])
            C_D += ma * data.ch[0]
            mag_D += ma * H.entry(i, j).mag()
    L_p = p * mag_D ** (p - 1.0) if p > 1 else 1.0
    return HoelderParams(max(L_p * C_D, 1e-300), 1.0)


__all__ = [
    "HoelderParams",
    "fval",
    "jac",
    "hess",
    "sobolev_integrand_point",
    "sobolev_integrand_batch",
    "sobolev_integrand_enclosure",
    "activation_pattern",
    "affine_on_box",
    "EllipticOperator",
    "residual_point",
    "residual_batch",
    "residual_enclosure",
    "enclosure_hoelder_params",
    "integrand_hoelder_params",
    "residual_hoelder_params",
]
