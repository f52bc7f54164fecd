"""Generate the committed fixture set: trained fleets, the PINN, and
their Monte-Carlo reference values.

Run as ``certquad-make-fixtures --out <dir>``. The output is a set of
weight JSON files plus a references.json the certifier's acceptance
tests consume; regeneration is deterministic per seed.
"""

from __future__ import annotations

import argparse
import json
import os

from .models import ExperimentSpec
from .reference import reference_norm, reference_residual
from .targets import GAUSSIAN_DOMAIN, PINN_DOMAIN, pinn_source
from .train import train_experiments

FLEET_SEEDS = (0, 1, 2, 3, 4)
FLEET_ARCHITECTURES = ("deep", "wide")
NORM_ORDERS = (0, 1, 2)


def _fleet_entry(path: str, seed_base: int) -> dict:
    norms = {}
    for k in NORM_ORDERS:
        norms[str(k)] = reference_norm(path, GAUSSIAN_DOMAIN, k, 2.0,
                                       method="mc", samples=50_000,
                                       seed=seed_base + k)
    return {
        "file": os.path.basename(path),
        "domain": [list(axis) for axis in GAUSSIAN_DOMAIN],
        "norms": norms,
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="fixture output directory")
    parser.add_argument("--epochs", type=int, default=2000,
                        help="training epochs for the fleet networks")
    parser.add_argument("--pinn-epochs", type=int, default=6000,
                        help="training epochs for the PINN")
    args = parser.parse_args(argv)
    os.makedirs(args.out, exist_ok=True)

    fleet = {}
    for arch in FLEET_ARCHITECTURES:
        for seed in FLEET_SEEDS:
            spec = ExperimentSpec("gaussian_peak", arch, "tanh",
                                  epochs=args.epochs, seed=seed)
            path = train_experiments(spec, args.out)
            name = f"gaussian_{arch}_seed{seed}"
            final = os.path.join(args.out, f"{name}.json")
            os.replace(path, final)
            fleet[name] = _fleet_entry(final, seed_base=1000 + 10 * seed)
            print(f"trained {name} -> {final}")

    pinn_spec = ExperimentSpec("pinn_tanh", "deep", "tanh", epochs=args.pinn_epochs)
    pinn_path = train_experiments(pinn_spec, args.out)
    pinn_final = os.path.join(args.out, "pinn_tanh.json")
    os.replace(pinn_path, pinn_final)
    residual = reference_residual(pinn_final, PINN_DOMAIN, pinn_source,
                                  p=2.0, samples=100_000, seed=2000)
    print(f"trained pinn -> {pinn_final} (residual estimate {residual['estimate']:.3e})")

    refs = {
        "fleet": fleet,
        "pinn": {
            "file": "pinn_tanh.json",
            "domain": [list(axis) for axis in PINN_DOMAIN],
            "residual": residual,
        },
    }
    ref_path = os.path.join(args.out, "references.json")
    with open(ref_path, "w", encoding="utf-8") as fh:
        json.dump(refs, fh, indent=2, sort_keys=True)
    print(f"wrote {ref_path}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
