"""Certified Sobolev-norm and residual-norm bounds for networks.

These entry points assemble the integrand, its enclosure, and optional
Hoelder data into a problem instance, run the adaptive loop, and transfer
the integral bracket through the p-th root: with ``|integral - Q| <= eta``
and a nonnegative integrand, the norm lies within ``eta**(1/p)`` of
``Q**(1/p)``, and the two-sided bound ``[sum lower, sum upper]`` maps to a
norm bracket the same way.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, replace
from typing import Optional

from .adaptive import (
    AlgorithmInstance,
    HoelderRefinement,
    ProblemInstance,
    StateInstance,
    StoppingCriteria,
    run,
)
from .enclosure import (
    EllipticOperator,
    _check_residual_net,
    integrand_hoelder_params,
    residual_batch,
    residual_enclosure,
    residual_hoelder_params,
    sobolev_integrand_batch,
    sobolev_integrand_enclosure,
)
from .errors import BudgetExhausted, UnsupportedDerivativeOrder
from .interval import Box
from .network import ActivationKind, Network
from .quadrature import exact_for_affine_piece

__all__ = [
    "TargetKind",
    "HistoryRecord",
    "CertifiedReport",
    "certify_norm",
    "certify_residual",
    "report_json",
    "history_csv",
]


class TargetKind(enum.Enum):
    LP = "lp"
    W1P = "w1p"
    W2P = "w2p"
    RESIDUAL = "residual"


@dataclass(frozen=True)
class HistoryRecord:
    """State summary after a step; gap is in norm units (upper - lower)."""

    step: int
    eta: float
    cells: int
    gap: float
    normalized_gap: float


@dataclass(frozen=True)
class CertifiedReport:
    """Outcome of a certified run.

    ``[norm_lower, norm_upper]`` brackets the true norm; ``quad`` and
    ``eta`` are the underlying integral estimate and its certified error,
    so the bracket is also contained in
    ``[quad**(1/p) - eta**(1/p), quad**(1/p) + eta**(1/p)]``.
    ``partition`` optionally points at a dump of the final partition.
    """

    target: TargetKind
    p: float
    norm_lower: float
    norm_upper: float
    quad: float
    eta: float
    steps: int
    cells: int
    history: tuple[HistoryRecord, ...]
    partition: Optional[str] = None

    def with_partition(self, ref: str) -> "CertifiedReport":
        return replace(self, partition=ref)


def _root(value: float, p: float) -> float:
    # integrand lower bounds are >= 0 mathematically; outward rounding can
    # leave a tiny negative sum, which clamps to zero before the root
    return max(0.0, value) ** (1.0 / p)


def _assemble(target: TargetKind, p: float, state: StateInstance, raw) -> CertifiedReport:
    bound = state.bound_total()
    norm_lower = _root(bound.lo, p)
    norm_upper = _root(bound.hi, p)
    records = []
    for n, eta_n, cells_n, lo_n, hi_n in raw:
        gap = _root(hi_n, p) - _root(lo_n, p)
        normalized = gap / norm_upper if norm_upper > 0.0 else gap
        records.append(HistoryRecord(n, eta_n, cells_n, gap, normalized))
    return CertifiedReport(
        target=target,
        p=p,
        norm_lower=norm_lower,
        norm_upper=norm_upper,
        quad=state.quad_total(),
        eta=state.eta_total(),
        steps=raw[-1][0] if raw else 0,
        cells=len(state.cells),
        history=tuple(records),
    )


def _run_certified(target, p, problem, algorithm, stop, threads, observer=None):
    raw = []

    def observe(n, state):
        bound = state.bound_total()
        raw.append((n, state.eta_total(), len(state.cells), bound.lo, bound.hi))
        if observer is not None:
            observer(n, state)

    try:
        _, _, state = run(problem, algorithm, stop, threads=threads, on_step=observe)
    except BudgetExhausted as exc:
        exc.report = _assemble(target, p, exc.state, raw)
        raise
    return _assemble(target, p, state, raw)


_TARGET_BY_ORDER = {0: TargetKind.LP, 1: TargetKind.W1P, 2: TargetKind.W2P}


def certify_norm(net: Network, omega: Box, k: int, p: float,
                 algorithm: AlgorithmInstance, stop: StoppingCriteria,
                 threads: int = 1, use_exact_hook: bool = True,
                 vertex_cap: int | None = None, observer=None) -> CertifiedReport:
    """Two-sided certified bound on the order-k Sobolev norm of a network.

    Args:
        net: the network.
        omega: the domain box.
        k: derivative order, 0, 1, or 2 (ReLU networks: 0 only).
        p: norm exponent, at least 1.
        algorithm: rule, marking, and refinement; Hoelder refinement
            without explicit params gets them derived from the network.
        stop: stopping criteria for the run.
        threads: max concurrent cell evaluations.
        use_exact_hook: for ReLU networks with integer p, integrate cells
            where the network is provably affine exactly, giving them zero
            gap.
        vertex_cap: largest vertex count the affine test may enumerate per
            cell before giving up; None uses the test's own default.
        observer: optional callable invoked as observer(step, state) after
            each recorded step, including the initial one.

    Returns:
        The certified report.

    Raises:
        UnsupportedDerivativeOrder: k > 0 for ReLU, or k > 2.
        BudgetExhausted: target not reached within the work limits; the
            exception carries a partial ``report`` built from the best
            state.
    """
    if k not in (0, 1, 2):
        raise UnsupportedDerivativeOrder(f"norm order must be 0, 1, or 2, got {k}")
    p = float(p)
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    if net.activation is ActivationKind.RELU and k > 0:
        raise UnsupportedDerivativeOrder("ReLU networks support order 0 only")

    exact = None
    if (use_exact_hook and net.activation is ActivationKind.RELU
            and k == 0 and p == int(p)):
        p_int = int(p)

        def exact(K):
            return exact_for_affine_piece(net, p_int, K, cap=vertex_cap)

    hoelder = None
    if isinstance(algorithm.refinement, HoelderRefinement) and algorithm.refinement.params is None:
        hoelder = integrand_hoelder_params(net, k, p, omega)

    problem = ProblemInstance(
        f=lambda X: sobolev_integrand_batch(net, k, p, X),
        enclosure=lambda K: sobolev_integrand_enclosure(net, k, p, K),
        omega=omega,
        exact=exact,
        hoelder=hoelder,
    )
    return _run_certified(_TARGET_BY_ORDER[k], p, problem, algorithm, stop, threads,
                          observer=observer)


def certify_residual(net: Network, op: EllipticOperator, omega: Box, p: float,
                     algorithm: AlgorithmInstance, stop: StoppingCriteria,
                     threads: int = 1, observer=None) -> CertifiedReport:
    """Two-sided certified bound on the interior PDE residual norm.

    The integrand is |D Phi - g|^p for the given elliptic operator; the
    report bounds its p-th root. Needs a smooth activation and a scalar
    output network.

    Raises:
        UnsupportedDerivativeOrder: ReLU activation.
        DimensionMismatch: vector-valued network.
        BudgetExhausted: as for certify_norm.
    """
    p = float(p)
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    _check_residual_net(net, op, p)

    hoelder = None
    if isinstance(algorithm.refinement, HoelderRefinement) and algorithm.refinement.params is None:
        hoelder = residual_hoelder_params(net, op, p, omega)

    problem = ProblemInstance(
        f=lambda X: residual_batch(net, op, p, X),
        enclosure=lambda K: residual_enclosure(net, op, p, K),
        omega=omega,
    )
    if hoelder is not None:
        problem = replace(problem, hoelder=hoelder)
    return _run_certified(TargetKind.RESIDUAL, p, problem, algorithm, stop, threads,
                          observer=observer)


def report_json(report: CertifiedReport) -> str:
    """JSON document mirroring the report fields; stable key order."""
    doc = {
        "target": report.target.value,
        "p": report.p,
        "norm_lower": report.norm_lower,
        "norm_upper": report.norm_upper,
        "quad": report.quad,
        "eta": report.eta,
        "steps": report.steps,
        "cells": report.cells,
        "history": [
            {
                "step": r.step,
                "eta": r.eta,
                "cells": r.cells,
                "gap": r.gap,
                "normalized_gap": r.normalized_gap,
            }
            for r in report.history
        ],
        "partition": report.partition,
    }
    return json.dumps(doc, sort_keys=True)


def history_csv(report: CertifiedReport) -> str:
    """Per-step convergence table: step, eta, cells, gap, normalized_gap."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["step", "eta", "cells", "gap", "normalized_gap"])
    for r in report.history:
        writer.writerow([r.step, repr(r.eta), r.cells, repr(r.gap), repr(r.normalized_gap)])
    return buf.getvalue()
