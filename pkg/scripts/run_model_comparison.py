#!/usr/bin/env python3
"""Compare reconstruction variants on identical data.

Three solvers see the same phantom, coils, mask and noise:

  * sensitivities constrained to the order-2 spherical basis,
  * the same with the cap raised to order 5,
  * unconstrained per-coil sensitivity maps (the direct baseline).

By default this runs at desk scale (64 x 64, 4 coils) and takes seconds.
--full switches to 190 x 190 with 8 coils and 1500 iterations, which takes
a few minutes; data sections stay identical across variants either way.
"""

import argparse
import os
import sys

from sphmri import cli
from sphmri import config as C


def base_overrides(full: bool):
    if full:
        return {
            "solver.step_rule": "adaptive",
            "regularization.alpha_coeff": 0.05,
        }
    return {
        "grid.n": 64,
        "coils.count": 4,
        "mask.turns": 8,
        "solver.iters": 600,
        "solver.step_rule": "adaptive",
        "regularization.alpha_tv": 0.0062,
        "regularization.alpha_coeff": 0.05,
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/comparison")
    parser.add_argument("--full", action="store_true", help="190 x 190, 8 coils, 1500 iterations")
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)

    os.makedirs(args.out, exist_ok=True)
    shared = base_overrides(args.full)
    variants = {
        "spherical_n2": {"model.kind": "spherical", "model.n_tilde": 2},
        "spherical_n5": {"model.kind": "spherical", "model.n_tilde": 5},
        "direct": {"model.kind": "direct"},
    }

    paths = []
    for name, extra in variants.items():
        cfg = C.replace(C.ExperimentConfig(), **{**shared, **extra})
        path = os.path.join(args.out, f"{name}.ini")
        C.save_config(path, cfg)
        paths.append(path)

    cli_args = ["compare", *paths, "--out", args.out]
    if args.seed is not None:
        cli_args += ["--seed", str(args.seed)]
    return cli.main(cli_args)


if __name__ == "__main__":
    sys.exit(main())
