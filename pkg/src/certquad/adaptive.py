"""Adaptive certified quadrature: mark, refine, re-evaluate, repeat.

A run keeps a partition of the domain into cells. Each cell stores the
certified bound ``B_K = F(K) * vol(K)`` next to the plain quadrature value
``Q_K``, so at any point the pair ``(sum Q_K, sum w(B_K))`` is a certificate:
the true integral lies within ``sum eta_K`` of the reported value, and the
two-sided bound ``[sum lower, sum upper]`` is available as well. Refinement
spends effort where the bound is widest (bulk marking), and either halves
every axis or subdivides by the amount the Hoelder data says is needed for
a fixed local error reduction.
"""

from __future__ import annotations

import contextvars
import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from numbers import Real
from typing import Callable, Optional

from .enclosure import HoelderParams
from .errors import BudgetExhausted, EvaluatorFailure, ZeroErrorCell
from .interval import Box, Interval
from .quadrature import QuadratureRule, integrate

__all__ = [
    "ProblemInstance",
    "AlgorithmInstance",
    "DoerflerMarking",
    "HoelderRefinement",
    "HalfRefinement",
    "Cell",
    "StateInstance",
    "StoppingCriteria",
    "init",
    "step",
    "run",
    "doerfler_mark",
    "hoelder_refine",
    "half_refine",
    "partition_csv",
    "partition_json",
]


@dataclass(frozen=True)
class ProblemInstance:
    """What to integrate: evaluator, enclosure, and domain.

    Args:
        f: vectorised point evaluator, mapping (n, d) points to (n,) values.
        enclosure: box enclosure of f; must contain f(x) for every x in the
            box it is given (soundness is assumed here, tested upstream).
        omega: integration domain.
        exact: optional hook returning the exact integral of f over a box,
            or None when it cannot certify one. Cells where it fires get a
            zero-width bound.
        hoelder: optional width-decay data for f's enclosure, used by
            Hoelder refinement when the algorithm does not carry its own.
    """

    f: Callable
    enclosure: Callable
    omega: Box
    exact: Optional[Callable] = None
    hoelder: Optional[HoelderParams] = None


@dataclass(frozen=True)
class DoerflerMarking:
    """Bulk marking: smallest greedy set carrying at least theta of the error."""

    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must be in (0, 1), got {self.theta}")


@dataclass(frozen=True)
class HoelderRefinement:
    """Grid refinement sized for a local error reduction by factor rho.

    ``params`` may be omitted when the problem instance carries Hoelder data.
    """

    rho: float
    params: Optional[HoelderParams] = None

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must be in (0, 1), got {self.rho}")


@dataclass(frozen=True)
class HalfRefinement:
    """Bisect every axis; 2^d children per cell."""


@dataclass(frozen=True)
class AlgorithmInstance:
    rule: QuadratureRule
    marking: DoerflerMarking
    refinement: HoelderRefinement | HalfRefinement


@dataclass(frozen=True)
class Cell:
    """One partition element with its certified bound.

    ``bound`` is F(K) * vol(K); ``quad`` is the quadrature value clamped
    into ``bound`` (the rule guarantees membership mathematically, clamping
    absorbs the last-ulp rounding of the dot product); ``error`` is the
    bound's width. ``index`` is the creation order, used as the
    deterministic secondary key wherever cells are sorted.
    """

    box: Box
    bound: Interval
    quad: float
    error: float
    index: int


@dataclass(frozen=True)
class StateInstance:
    """A partition of the domain with per-cell bounds."""

    cells: tuple[Cell, ...]
    next_index: int

    def quad_total(self) -> float:
        return math.fsum(c.quad for c in self.cells)

    def eta_total(self) -> float:
        return math.fsum(c.error for c in self.cells)

    def bound_total(self) -> Interval:
        lo = math.fsum(c.bound.lo for c in self.cells)
        hi = math.fsum(c.bound.hi for c in self.cells)
        return Interval(lo, hi)


@dataclass(frozen=True)
class StoppingCriteria:
    """Stop at whichever comes first; at least one limit must be set.

    When ``eta_target`` is set it is the goal of the run: hitting another
    limit before reaching it raises BudgetExhausted. Without a target the
    other limits simply bound the amount of work and the run ends normally.
    """

    max_steps: Optional[int] = None
    eta_target: Optional[float] = None
    cell_budget: Optional[int] = None

    def __post_init__(self):
        if self.max_steps is None and self.eta_target is None and self.cell_budget is None:
            raise ValueError("at least one stopping criterion must be set")
        if self.max_steps is not None and self.max_steps < 0:
            raise ValueError(f"max_steps must be >= 0, got {self.max_steps}")
        if self.eta_target is not None and self.eta_target < 0:
            raise ValueError(f"eta_target must be >= 0, got {self.eta_target}")
        if self.cell_budget is not None and self.cell_budget < 1:
            raise ValueError(f"cell_budget must be >= 1, got {self.cell_budget}")


def _as_interval(value, what: str) -> Interval:
    if isinstance(value, Interval):
        return value
    if isinstance(value, Real):
        v = float(value)
        if math.isnan(v):
            raise EvaluatorFailure(f"{what} returned NaN")
        return Interval(v, v)
    raise EvaluatorFailure(f"{what} returned {type(value).__name__}, expected an interval")


def _enclose(problem: ProblemInstance, box: Box) -> Interval:
    try:
        raw = problem.enclosure(box)
    except EvaluatorFailure:
        raise
    except Exception as exc:
        raise EvaluatorFailure(f"enclosure raised {type(exc).__name__}: {exc}") from exc
    iv = _as_interval(raw, "enclosure")
    if math.isnan(iv.lo) or math.isnan(iv.hi):
        raise EvaluatorFailure("enclosure returned NaN bounds")
    return iv


def _make_cell(problem: ProblemInstance, algorithm: AlgorithmInstance, box: Box, index: int) -> Cell:
    if box.volume() == 0.0:
        # measure zero: contributes exactly nothing, whatever f does there
        return Cell(box, Interval(0.0, 0.0), 0.0, 0.0, index)
    if problem.exact is not None:
        val = problem.exact(box)
        if val is not None:
            v = float(val)
            return Cell(box, Interval(v, v), v, 0.0, index)
    bound = _enclose(problem, box) * box.volume()
    quad = integrate(algorithm.rule, problem.f, box)
    quad = min(max(quad, bound.lo), bound.hi)
    return Cell(box, bound, quad, bound.width(), index)


def _evaluate_cells(problem, algorithm, boxes, start_index, threads):
    if threads <= 1 or len(boxes) <= 1:
        return [_make_cell(problem, algorithm, b, start_index + i) for i, b in enumerate(boxes)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            # fresh context copy per task so the rounding policy travels
            # with the work instead of resetting to the default in workers
            pool.submit(contextvars.copy_context().run, _make_cell, problem, algorithm, b, start_index + i)
            for i, b in enumerate(boxes)
        ]
        return [f.result() for f in futures]


def init(problem: ProblemInstance, algorithm: AlgorithmInstance) -> StateInstance:
    """The one-cell state covering the whole domain."""
    cell = _make_cell(problem, algorithm, problem.omega, 0)
    return StateInstance((cell,), 1)


def doerfler_mark(errors, theta: float) -> set:
    """Greedy bulk marking.

    Repeatedly marks every cell tied at the current maximum error until the
    marked mass reaches ``theta`` times the total. Cells with zero error are
    never marked; when the total is zero the result is empty.

    Args:
        errors: iterable of (cell id, error) pairs.
        theta: bulk fraction in (0, 1).

    Returns:
        Set of marked cell ids.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must be in (0, 1), got {theta}")
    pairs = list(errors)
    total = math.fsum(e for _, e in pairs)
    if total <= 0.0:
        return set()
    groups: dict[float, list] = {}
    for cid, e in pairs:
        if e > 0.0:
            groups.setdefault(e, []).append(cid)
    marked: set = set()
    acc = 0.0
    for val in sorted(groups, reverse=True):
        if acc >= theta * total:
            break
        marked.update(groups[val])
        acc += val * len(groups[val])
    return marked


def hoelder_refine(K: Box, hp: HoelderParams, F, rho: float) -> list[Box]:
    """Subdivide K finely enough to cut its error bound by the factor rho.

    With w(F(K')) <= C w(K')^gamma on sub-boxes, splitting axis i into
    m_i = ceil(l_i (C vol(K) / (rho eta_K))^(1/gamma)) parts makes every
    child narrow enough that the children's error bounds sum to at most
    rho * eta_K, where eta_K = w(F(K)) vol(K).

    Raises:
        ZeroErrorCell: when eta_K is zero; such cells must not be refined.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must be in (0, 1), got {rho}")
    width = _as_interval(F(K), "enclosure").width()
    eta = width * K.volume()
    if eta == 0.0:
        raise ZeroErrorCell("cell has zero error bound; nothing to refine")
    factor = (hp.C * K.volume() / (rho * eta)) ** (1.0 / hp.gamma)
    counts = tuple(max(1, math.ceil(l * factor)) for l in K.widths())
    return K.grid(counts)


def half_refine(K: Box) -> list[Box]:
    """All 2^d children from bisecting every axis.

    Degenerate axes still contribute two (coincident) halves, so the count
    is always exactly 2^d.
    """
    mid = K.midpoint()
    pairs = [
        ((float(K.lo[i]), float(mid[i])), (float(mid[i]), float(K.hi[i])))
        for i in range(K.dim)
    ]
    out = []
    for combo in product(*pairs):
        lo = [c[0] for c in combo]
        hi = [c[1] for c in combo]
        out.append(Box(lo, hi))
    return out


def _refine(cell: Cell, problem: ProblemInstance, algorithm: AlgorithmInstance) -> list[Box]:
    ref = algorithm.refinement
    if isinstance(ref, HalfRefinement):
        return half_refine(cell.box)
    hp = ref.params if ref.params is not None else problem.hoelder
    if hp is None:
        raise ValueError("Hoelder refinement needs params on the algorithm or the problem")
    return hoelder_refine(cell.box, hp, problem.enclosure, ref.rho)


def step(state: StateInstance, problem: ProblemInstance, algorithm: AlgorithmInstance,
         threads: int = 1) -> StateInstance:
    """Mark the widest cells, refine them, and re-evaluate the children.

    Unmarked cells are carried over untouched. When every cell has zero
    error the state is returned unchanged.
    """
    marked = doerfler_mark(
        ((c.index, c.error) for c in state.cells), algorithm.marking.theta
    )
    if not marked:
        return state
    keep = [c for c in state.cells if c.index not in marked]
    boxes: list[Box] = []
    for cell in sorted((c for c in state.cells if c.index in marked), key=lambda c: c.index):
        boxes.extend(_refine(cell, problem, algorithm))
    children = _evaluate_cells(problem, algorithm, boxes, state.next_index, threads)
    return StateInstance(tuple(keep) + tuple(children), state.next_index + len(boxes))


def run(problem: ProblemInstance, algorithm: AlgorithmInstance, stop: StoppingCriteria,
        threads: int = 1, on_step=None) -> tuple[float, float, StateInstance]:
    """Adaptive loop: init, then step until a stopping criterion fires.

    Args:
        problem: what to integrate.
        algorithm: rule, marking, and refinement choices.
        stop: limits; see StoppingCriteria for target-vs-budget semantics.
        threads: max concurrent cell evaluations within one step.
        on_step: optional callback, called as on_step(n, state) after init
            (n=0) and after every completed step.

    Returns:
        (Q, eta, state): the quadrature total, the certified error bound
        with |integral - Q| <= eta, and the final state.

    Raises:
        BudgetExhausted: an eta_target was set and a work limit was hit
            first; the exception carries the best state reached.
    """
    state = init(problem, algorithm)
    if on_step is not None:
        on_step(0, state)
    steps = 0
    while True:
        eta = state.eta_total()
        if stop.eta_target is not None and eta <= stop.eta_target:
            break
        if stop.max_steps is not None and steps >= stop.max_steps:
            if stop.eta_target is not None:
                raise BudgetExhausted(
                    f"eta target {stop.eta_target} not reached in {steps} steps"
                    f" (eta = {eta})", state)
            break
        if stop.cell_budget is not None and len(state.cells) >= stop.cell_budget:
            if stop.eta_target is not None:
                raise BudgetExhausted(
                    f"eta target {stop.eta_target} not reached within"
                    f" {stop.cell_budget} cells (eta = {eta})", state)
            break
        if eta == 0.0:
            break
        state = step(state, problem, algorithm, threads=threads)
        steps += 1
        if on_step is not None:
            on_step(steps, state)
    return state.quad_total(), state.eta_total(), state


def partition_csv(state: StateInstance) -> str:
    """One cell per line: lo_i, hi_i per axis, then lower, upper, quad, error."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    dim = state.cells[0].box.dim if state.cells else 0
    header = []
    for i in range(dim):
        header += [f"lo{i}", f"hi{i}"]
    writer.writerow(header + ["lower", "upper", "quad", "error"])
    for c in state.cells:
        row = []
        for i in range(dim):
            row += [repr(float(c.box.lo[i])), repr(float(c.box.hi[i]))]
        writer.writerow(row + [repr(c.bound.lo), repr(c.bound.hi), repr(c.quad), repr(c.error)])
    return buf.getvalue()


def partition_json(state: StateInstance) -> str:
    """Same records as the CSV dump, as a JSON document."""
    cells = [
        {
            "lo": [float(v) for v in c.box.lo],
            "hi": [float(v) for v in c.box.hi],
            "lower": c.bound.lo,
            "upper": c.bound.hi,
            "quad": c.quad,
            "error": c.error,
        }
        for c in state.cells
    ]
    dim = state.cells[0].box.dim if state.cells else 0
    return json.dumps({"dim": dim, "cells": cells})
