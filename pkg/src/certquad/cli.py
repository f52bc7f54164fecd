"""Command-line front end.

Runs certifications from a JSON config, audits enclosure soundness by
sampling, dumps partitions for plotting, and prints network summaries.
One command per process; file outputs are deterministic given the config
and seed.

Exit codes: 0 success, 2 config error, 4 work budget exhausted with
partial results written, 3 any other runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .adaptive import (
    AlgorithmInstance,
    DoerflerMarking,
    HalfRefinement,
    HoelderRefinement,
    StoppingCriteria,
    partition_csv,
    partition_json,
)
from .certify import (
    CertifiedReport,
    certify_norm,
    certify_residual,
    history_csv,
    report_json,
)
from .enclosure import EllipticOperator, fval, hess, jac, residual_batch, residual_enclosure
from .errors import BudgetExhausted, CertquadError, ConfigError, ParseError
from .expressions import parse_expression
from .interval import Box, IntervalMatrix, rounding
from .network import Network, derivatives_batch, forward_batch, load_network
from .quadrature import QuadratureRule, gauss_tensor, midpoint

TARGETS = ("lp", "w1p", "w2p", "residual")
_ORDER_BY_TARGET = {"lp": 0, "w1p": 1, "w2p": 2}


# ---------------------------------------------------------------------------
# Run configuration.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one certification run.

    Mirrors the JSON config document one to one, so parse -> serialize ->
    parse is the identity. ``operator`` keeps the raw coefficient entries
    (numbers or expression strings) and is required exactly when the
    target is ``residual``.
    """

    network: str
    domain: tuple[tuple[float, float], ...]
    target: str
    p: float = 2.0
    theta: float = 0.5
    rho: float = 0.5
    refinement: str = "half"
    rule: str = "midpoint"
    max_steps: int | None = None
    eta_target: float | None = None
    cell_budget: int | None = None
    seed: int = 0
    threads: int = 1
    rounding: str = "outward"
    vertex_cap: int | None = None
    out_dir: str = "out"
    partition: str | None = None
    operator: dict | None = None

    def to_dict(self) -> dict:
        """Plain-JSON form; from_dict of the result reproduces self."""
        return {
            "network": self.network,
            "domain": [list(axis) for axis in self.domain],
            "target": self.target,
            "p": self.p,
            "theta": self.theta,
            "rho": self.rho,
            "refinement": self.refinement,
            "rule": self.rule,
            "stop": {
                "max_steps": self.max_steps,
                "eta_target": self.eta_target,
                "cell_budget": self.cell_budget,
            },
            "seed": self.seed,
            "threads": self.threads,
            "rounding": self.rounding,
            "vertex_cap": self.vertex_cap,
            "out_dir": self.out_dir,
            "partition": self.partition,
            "operator": self.operator,
        }


_KNOWN_KEYS = frozenset(
    ("network", "domain", "target", "p", "theta", "rho", "refinement", "rule",
     "stop", "seed", "threads", "rounding", "vertex_cap", "out_dir",
     "partition", "operator")
)


def _need(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _as_float(value, field: str) -> float:
    _need(isinstance(value, (int, float)) and not isinstance(value, bool),
          f"{field} must be a number, got {value!r}")
    return float(value)


def _as_int(value, field: str) -> int:
    _need(isinstance(value, int) and not isinstance(value, bool),
          f"{field} must be an integer, got {value!r}")
    return value


def _parse_domain(raw) -> tuple[tuple[float, float], ...]:
    _need(isinstance(raw, list) and len(raw) >= 1,
          "domain must be a non-empty list of [lo, hi] pairs")
    axes = []
    for i, pair in enumerate(raw):
        _need(isinstance(pair, list) and len(pair) == 2,
              f"domain[{i}] must be a [lo, hi] pair")
        lo = _as_float(pair[0], f"domain[{i}][0]")
        hi = _as_float(pair[1], f"domain[{i}][1]")
        _need(lo <= hi, f"domain[{i}] must satisfy lo <= hi, got [{lo}, {hi}]")
        axes.append((lo, hi))
    return tuple(axes)


def _check_coefficient(entry, field: str, dim: int) -> None:
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return
    _need(isinstance(entry, str), f"{field} must be a number or expression string")
    try:
        expr = parse_expression(entry)
    except ParseError as exc:
        raise ConfigError(f"{field}: {exc}") from exc
    _need(expr.dim_required <= dim,
          f"{field} uses x{expr.dim_required} but the domain is {dim}-dimensional")


def _parse_operator(raw, dim: int) -> dict:
    _need(isinstance(raw, dict), "operator must be an object")
    for key in raw:
        _need(key in ("a", "b", "c", "g"), f"operator has unknown key {key!r}")
    for key in ("a", "b", "c", "g"):
        _need(key in raw, f"operator.{key} is required for residual targets")
    a, b = raw["a"], raw["b"]
    _need(isinstance(a, list) and len(a) == dim
          and all(isinstance(row, list) and len(row) == dim for row in a),
          f"operator.a must be a {dim}x{dim} grid")
    for i, row in enumerate(a):
        for j, entry in enumerate(row):
            _check_coefficient(entry, f"operator.a[{i}][{j}]", dim)
    _need(isinstance(b, list) and len(b) == dim,
          f"operator.b must have length {dim}")
    for i, entry in enumerate(b):
        _check_coefficient(entry, f"operator.b[{i}]", dim)
    _check_coefficient(raw["c"], "operator.c", dim)
    _check_coefficient(raw["g"], "operator.g", dim)
    return raw


def config_from_dict(raw: dict) -> RunConfig:
    """Validate a parsed config document; errors name the offending field."""
    _need(isinstance(raw, dict), "config must be a JSON object")
    for key in raw:
        _need(key in _KNOWN_KEYS, f"unknown config key {key!r}")
    for key in ("network", "domain", "target"):
        _need(key in raw, f"config key {key!r} is required")
    _need(isinstance(raw["network"], str) and raw["network"],
          "network must be a file path")
    domain = _parse_domain(raw["domain"])
    target = raw["target"]
    _need(target in TARGETS, f"target must be one of {', '.join(TARGETS)}, got {target!r}")

    p = _as_float(raw.get("p", 2.0), "p")
    _need(p >= 1.0, f"p must be >= 1, got {p}")
    theta = _as_float(raw.get("theta", 0.5), "theta")
    _need(0.0 < theta < 1.0, f"theta must be in (0, 1), got {theta}")
    rho = _as_float(raw.get("rho", 0.5), "rho")
    _need(0.0 < rho < 1.0, f"rho must be in (0, 1), got {rho}")

    refinement = raw.get("refinement", "half")
    _need(refinement in ("hoelder", "half"),
          f"refinement must be hoelder or half, got {refinement!r}")
    rule = raw.get("rule", "midpoint")
    _build_rule(rule)

    stop = raw.get("stop", {})
    _need(isinstance(stop, dict), "stop must be an object")
    for key in stop:
        _need(key in ("max_steps", "eta_target", "cell_budget"),
              f"stop has unknown key {key!r}")
    max_steps = stop.get("max_steps")
    if max_steps is not None:
        max_steps = _as_int(max_steps, "stop.max_steps")
        _need(max_steps >= 0, f"stop.max_steps must be >= 0, got {max_steps}")
    eta_target = stop.get("eta_target")
    if eta_target is not None:
        eta_target = _as_float(eta_target, "stop.eta_target")
        _need(eta_target >= 0.0, f"stop.eta_target must be >= 0, got {eta_target}")
    cell_budget = stop.get("cell_budget")
    if cell_budget is not None:
        cell_budget = _as_int(cell_budget, "stop.cell_budget")
        _need(cell_budget >= 1, f"stop.cell_budget must be >= 1, got {cell_budget}")
    _need(max_steps is not None or eta_target is not None or cell_budget is not None,
          "stop must set at least one of max_steps, eta_target, cell_budget")

    seed = _as_int(raw.get("seed", 0), "seed")
    threads = _as_int(raw.get("threads", 1), "threads")
    _need(threads >= 1, f"threads must be >= 1, got {threads}")
    mode = raw.get("rounding", "outward")
    _need(mode in ("exact", "outward"), f"rounding must be exact or outward, got {mode!r}")
    vertex_cap = raw.get("vertex_cap")
    if vertex_cap is not None:
        vertex_cap = _as_int(vertex_cap, "vertex_cap")
        _need(vertex_cap >= 1, f"vertex_cap must be >= 1, got {vertex_cap}")
    out_dir = raw.get("out_dir", "out")
    _need(isinstance(out_dir, str) and out_dir, "out_dir must be a path")
    partition = raw.get("partition")
    _need(partition in (None, "csv", "json"),
          f"partition must be null, csv, or json, got {partition!r}")

    operator = raw.get("operator")
    if target == "residual":
        _need(operator is not None, "operator is required when target is residual")
        operator = _parse_operator(operator, len(domain))
    else:
        _need(operator is None, f"operator is only meaningful for residual targets, not {target}")

    return RunConfig(
        network=raw["network"], domain=domain, target=target, p=p,
        theta=theta, rho=rho, refinement=refinement, rule=rule,
        max_steps=max_steps, eta_target=eta_target, cell_budget=cell_budget,
        seed=seed, threads=threads, rounding=mode, vertex_cap=vertex_cap,
        out_dir=out_dir, partition=partition, operator=operator,
    )


def load_config(path: str) -> RunConfig:
    """Read and validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON (line {exc.lineno}): {exc.msg}") from exc
    return config_from_dict(raw)


# ---------------------------------------------------------------------------
# Building run ingredients from a config.
# ---------------------------------------------------------------------------


def _build_rule(text) -> QuadratureRule:
    _need(isinstance(text, str), f"rule must be a string, got {text!r}")
    if text == "midpoint":
        return midpoint()
    if text.startswith("gauss:"):
        try:
            n = int(text[len("gauss:"):])
        except ValueError:
            n = 0
        _need(n >= 1, f"rule gauss:n needs a positive point count, got {text!r}")
        return gauss_tensor(n)
    raise ConfigError(f"rule must be midpoint or gauss:n, got {text!r}")


def _build_box(cfg: RunConfig) -> Box:
    lo = [axis[0] for axis in cfg.domain]
    hi = [axis[1] for axis in cfg.domain]
    return Box(lo, hi)


def _build_algorithm(cfg: RunConfig) -> AlgorithmInstance:
    refinement = HoelderRefinement(cfg.rho) if cfg.refinement == "hoelder" else HalfRefinement()
    return AlgorithmInstance(_build_rule(cfg.rule), DoerflerMarking(cfg.theta), refinement)


def _build_stop(cfg: RunConfig) -> StoppingCriteria:
    return StoppingCriteria(max_steps=cfg.max_steps, eta_target=cfg.eta_target,
                            cell_budget=cfg.cell_budget)


def _coefficient_value(entry):
    if isinstance(entry, str):
        return parse_expression(entry)
    return float(entry)


def _build_operator(cfg: RunConfig) -> EllipticOperator:
    raw = cfg.operator
    d = len(cfg.domain)
    a = [[_coefficient_value(raw["a"][i][j]) for j in range(d)] for i in range(d)]
    b = [_coefficient_value(raw["b"][i]) for i in range(d)]
    return EllipticOperator(d, a, b, _coefficient_value(raw["c"]), _coefficient_value(raw["g"]))


def _load_net(cfg: RunConfig) -> Network:
    net = load_network(cfg.network)
    _need(net.input_dim == len(cfg.domain),
          f"domain has {len(cfg.domain)} axes but the network takes {net.input_dim} inputs")
    return net


def _run(cfg: RunConfig, observer=None) -> CertifiedReport:
    net = _load_net(cfg)
    omega = _build_box(cfg)
    algorithm = _build_algorithm(cfg)
    stop = _build_stop(cfg)
    with rounding(cfg.rounding):
        if cfg.target == "residual":
            op = _build_operator(cfg)
            return certify_residual(net, op, omega, cfg.p, algorithm, stop,
                                    threads=cfg.threads, observer=observer)
        return certify_norm(net, omega, _ORDER_BY_TARGET[cfg.target], cfg.p,
                            algorithm, stop, threads=cfg.threads,
                            vertex_cap=cfg.vertex_cap, observer=observer)


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _dump_state(state, fmt: str, out_dir: str) -> str:
    name = f"partition.{fmt}"
    dump = partition_csv(state) if fmt == "csv" else partition_json(state)
    _write(os.path.join(out_dir, name), dump)
    return name


def _write_outputs(cfg: RunConfig, report: CertifiedReport, state) -> list[str]:
    os.makedirs(cfg.out_dir, exist_ok=True)
    written = []
    if cfg.partition is not None and state is not None:
        name = _dump_state(state, cfg.partition, cfg.out_dir)
        report = report.with_partition(name)
        written.append(name)
    _write(os.path.join(cfg.out_dir, "report.json"), report_json(report))
    _write(os.path.join(cfg.out_dir, "history.csv"), history_csv(report))
    return ["report.json", "history.csv"] + written


def _print_report(cfg: RunConfig, report: CertifiedReport, written: list[str]) -> None:
    print(f"target={cfg.target} p={report.p} steps={report.steps} cells={report.cells}")
    print(f"norm in [{report.norm_lower!r}, {report.norm_upper!r}]")
    print(f"eta={report.eta!r} gap={report.norm_upper - report.norm_lower!r}")
    print("wrote " + " ".join(os.path.join(cfg.out_dir, name) for name in written))


def cmd_certify(cfg: RunConfig) -> int:
    last_state = [None]

    def observer(_n, state):
        last_state[0] = state

    try:
        report = _run(cfg, observer=observer)
    except BudgetExhausted as exc:
        written = _write_outputs(cfg, exc.report, exc.state)
        _print_report(cfg, exc.report, written)
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 4
    written = _write_outputs(cfg, report, last_state[0])
    _print_report(cfg, report, written)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _shrunk(lo: np.ndarray, hi: np.ndarray, corrupt: bool) -> tuple[np.ndarray, np.ndarray]:
    # The negative-control hook collapses each enclosure to a sliver around
    # its midpoint; a sound audit must then report violations.
    if not corrupt:
        return lo, hi
    mid, rad = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return mid - 0.05 * rad, mid + 0.05 * rad


class _Audit:
    """Containment counters and tightness ratios for one enclosure kind."""

    def __init__(self) -> None:
        self.checks = 0
        self.violations = 0
        self.ratios: list[float] = []

    def record(self, lo: np.ndarray, hi: np.ndarray, samples: np.ndarray, corrupt: bool) -> None:
        lo, hi = _shrunk(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float), corrupt)
        flat_lo, flat_hi = lo.ravel(), hi.ravel()
        vals = samples.reshape(samples.shape[0], -1)
        self.checks += vals.size
        below = vals < flat_lo[None, :]
        above = vals > flat_hi[None, :]
        self.violations += int(np.count_nonzero(below | above))
        emp = vals.max(axis=0) - vals.min(axis=0)
        keep = emp > 0.0
        if np.any(keep):
            self.ratios.extend(((flat_hi - flat_lo)[keep] / emp[keep]).tolist())

    def summary(self) -> dict:
        ratios = np.asarray(self.ratios, dtype=float)
        return {
            "checks": self.checks,
            "violations": self.violations,
            "tightness_mean": float(ratios.mean()) if ratios.size else None,
            "tightness_min": float(ratios.min()) if ratios.size else None,
        }


def _matrix_bounds(M: IntervalMatrix) -> tuple[np.ndarray, np.ndarray]:
    return M.lo, M.hi


def _random_subbox(rng: np.random.Generator, omega: Box) -> Box:
    lo = np.asarray(omega.lo, dtype=float)
    hi = np.asarray(omega.hi, dtype=float)
    a = rng.uniform(lo, hi)
    b = rng.uniform(lo, hi)
    return Box(np.minimum(a, b), np.maximum(a, b))


def cmd_verify(cfg: RunConfig, boxes: int, samples: int, corrupt: bool = False) -> int:
    """Monte-Carlo containment audit of the enclosures named by the target."""
    net = _load_net(cfg)
    omega = _build_box(cfg)
    op = _build_operator(cfg) if cfg.target == "residual" else None
    rng = np.random.default_rng(cfg.seed)
    order = 2 if net.activation.smooth else 0
    audits = {"fval": _Audit()}
    if order == 2:
        audits["jac"] = _Audit()
        audits["hess"] = _Audit()
    if op is not None:
        audits["residual"] = _Audit()

    with rounding(cfg.rounding):
        for _ in range(boxes):
            K = _random_subbox(rng, omega)
            X = K.sample(rng, samples)
            enc = fval(net, net.depth + 1, K)
            audits["fval"].record(enc.lo, enc.hi, forward_batch(net, X), corrupt)
            if order == 2:
                vals, J, H = derivatives_batch(net, X, order=2)
                jlo, jhi = _matrix_bounds(jac(net, 0, K))
                audits["jac"].record(jlo, jhi, J, corrupt)
                for i in range(net.output_dim):
                    hlo, hhi = _matrix_bounds(hess(net, i, 0, K))
                    audits["hess"].record(hlo, hhi, H[:, i], corrupt)
            if op is not None:
                r = residual_enclosure(net, op, cfg.p, K)
                audits["residual"].record(
                    np.array([r.lo]), np.array([r.hi]),
                    residual_batch(net, op, cfg.p, X)[:, None], corrupt)

    total = sum(a.violations for a in audits.values())
    result = {
        "boxes": boxes,
        "samples": samples,
        "seed": cfg.seed,
        "corrupt": corrupt,
        "violations": total,
        "by_kind": {name: audit.summary() for name, audit in sorted(audits.items())},
    }
    os.makedirs(cfg.out_dir, exist_ok=True)
    _write(os.path.join(cfg.out_dir, "verify.json"), json.dumps(result, indent=2, sort_keys=True))
    for name, audit in sorted(audits.items()):
        s = audit.summary()
        tight = "n/a" if s["tightness_mean"] is None else f"{s['tightness_mean']:.3f}"
        print(f"{name}: checks={s['checks']} violations={s['violations']} tightness~{tight}")
    print(f"total violations: {total}")
    if total != 0:
        print("enclosure audit failed", file=sys.stderr)
        return 3
    return 0


# ---------------------------------------------------------------------------
# dump-partition and info
# ---------------------------------------------------------------------------


def cmd_dump_partition(cfg: RunConfig, fmt: str | None = None) -> int:
    """Re-run per config and write the final partition in csv or json form."""
    fmt = fmt or cfg.partition or "csv"
    _need(fmt in ("csv", "json"), f"partition format must be csv or json, got {fmt!r}")
    last_state = [None]

    def observer(_n, state):
        last_state[0] = state

    code = 0
    try:
        report = _run(cfg, observer=observer)
        state = last_state[0]
    except BudgetExhausted as exc:
        report, state = exc.report, exc.state
        code = 4
    os.makedirs(cfg.out_dir, exist_ok=True)
    name = _dump_state(state, fmt, cfg.out_dir)
    print(f"wrote {os.path.join(cfg.out_dir, name)} with {report.cells} records")
    return code


def cmd_info(cfg: RunConfig) -> int:
    net = _load_net(cfg)
    widths = [w.shape[0] for w in net.weights[:-1]]
    params = sum(w.size + b.size for w, b in zip(net.weights, net.biases))
    print(f"network: {cfg.network}")
    print(f"activation: {net.activation.value}")
    print(f"input dim: {net.input_dim}")
    print(f"output dim: {net.output_dim}")
    print(f"hidden widths: {', '.join(str(w) for w in widths) if widths else 'none'}")
    print(f"hidden layers: {net.depth}")
    print(f"parameters: {params}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing and dispatch.
# ---------------------------------------------------------------------------


def _apply_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates = {}
    if args.out is not None:
        updates["out_dir"] = args.out
    if args.threads is not None:
        _need(args.threads >= 1, f"threads must be >= 1, got {args.threads}")
        updates["threads"] = args.threads
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.rounding is not None:
        updates["rounding"] = args.rounding
    return dataclasses.replace(cfg, **updates) if updates else cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="certquad",
        description="Certified integration and norm bounds for small dense networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="path to the JSON run config")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--threads", type=int, default=None,
                       help="max concurrent cell evaluations (overrides config)")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (overrides config)")
        p.add_argument("--rounding", choices=("exact", "outward"), default=None,
                       help="interval rounding mode (overrides config)")

    common(sub.add_parser("certify", help="run a certification and write report files"))

    verify = sub.add_parser("verify", help="sample-based containment audit of the enclosures")
    common(verify)
    verify.add_argument("--boxes", type=int, default=100, help="number of random sub-boxes")
    verify.add_argument("--samples", type=int, default=1000, help="sample points per box")
    verify.add_argument("--corrupt", action="store_true",
                        help=argparse.SUPPRESS)  # negative-control hook for tests

    dump = sub.add_parser("dump-partition", help="re-run per config and dump the partition")
    common(dump)
    dump.add_argument("--format", choices=("csv", "json"), default=None,
                      help="dump format (defaults to the config's partition setting or csv)")

    common(sub.add_parser("info", help="print a network summary"))
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        if args.command == "certify":
            return cmd_certify(cfg)
        if args.command == "verify":
            _need(args.boxes >= 1, f"--boxes must be >= 1, got {args.boxes}")
            _need(args.samples >= 1, f"--samples must be >= 1, got {args.samples}")
            return cmd_verify(cfg, args.boxes, args.samples, corrupt=args.corrupt)
        if args.command == "dump-partition":
            return cmd_dump_partition(cfg, args.format)
        return cmd_info(cfg)
    except (ConfigError, ParseError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BudgetExhausted as exc:  # pragma: no cover - commands handle their own
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 4
    except CertquadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
