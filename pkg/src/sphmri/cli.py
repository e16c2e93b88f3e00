"""Command-line front end.

Three subcommands:

* ``run``     - one reconstruction from an INI config, artifacts to a directory
* ``basis``   - render the sampled sensitivity basis functions as PNGs
* ``compare`` - run several configs on identical data, tabulate metrics

Exit codes: 0 success, 2 configuration problem, 3 numerical failure during
the solve, 4 file I/O problem.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import experiment, fileio, sphfuncs
from .admm import NumericalDivergence
from .config import ConfigError, load_config, replace
from .grid import assemble_basis, build_spherical_view, ImageGrid

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _apply_overrides(cfg, args):
    overrides = {}
    if args.iters is not None:
        overrides["solver.iters"] = args.iters
    if args.seed is not None:
        # One master seed fans out to the per-component streams so a single
        # flag still yields fully deterministic, decorrelated draws.
        overrides["coils.seed"] = args.seed
        overrides["mask.seed"] = args.seed + 1
        overrides["noise.seed"] = args.seed + 2
        overrides["solver.norm_seed"] = args.seed + 3
    return replace(cfg, **overrides) if overrides else cfg


def _cmd_run(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    outcome = experiment.run_experiment(cfg)
    experiment.write_artifacts(args.out, cfg, outcome)
    for row in outcome.rows:
        if row.target == "image":
            print(f"{row.label}: psnr {row.psnr_db:.2f} dB, ssim {row.ssim:.4f}")
    print(f"wrote artifacts to {args.out}")
    return EXIT_OK


def _cmd_basis(args) -> int:
    cfg = load_config(args.config)
    grid = ImageGrid(cfg.grid.n, cfg.grid.step, cfg.grid.z0)
    view = build_spherical_view(grid)
    zeta = sphfuncs.wave_number(
        cfg.physics.omega, cfg.physics.mu, cfg.physics.sigma, cfg.physics.epsilon
    )
    basis = assemble_basis(view, zeta, cfg.model.n_tilde)
    os.makedirs(args.out, exist_ok=True)
    for l in range(1, basis.l_max + 1):
        order, degree = sphfuncs.basis_order_degree(l)
        name = f"basis_l{l:03d}_n{order}_m{degree:+d}.png"
        fileio.save_magnitude_png(os.path.join(args.out, name), basis.column_image(l))
    print(f"wrote {basis.l_max} basis images to {args.out}")
    return EXIT_OK


def _data_sections_text(cfg) -> str:
    from .config import config_to_ini_text

    text = config_to_ini_text(cfg)
    keep = ("[grid]", "[physics]", "[coils]", "[phantom]", "[mask]", "[noise]", "[perturbation]")
    chunks, current, keeping = [], [], False
    for line in text.splitlines():
        if line.startswith("["):
            keeping = line in keep
        if keeping:
            current.append(line)
    chunks.append("\n".join(current))
    return "\n".join(chunks)


def _cmd_compare(args) -> int:
    cfgs = [_apply_overrides(load_config(path), args) for path in args.configs]
    reference = _data_sections_text(cfgs[0])
    for path, cfg in zip(args.configs[1:], cfgs[1:], strict=True):
        if _data_sections_text(cfg) != reference:
            raise ConfigError(
                f"config {path} generates different data than {args.configs[0]}; "
                "compare requires identical data sections"
            )

    os.makedirs(args.out, exist_ok=True)
    lines = ["method,iterations,psnr_db,ssim"]
    for path, cfg in zip(args.configs, cfgs, strict=True):
        outcome = experiment.run_experiment(cfg)
        label = f"{os.path.splitext(os.path.basename(path))[0]}:{cfg.model.kind}"
        if cfg.model.kind == "spherical":
            label += f"-n{cfg.model.n_tilde}"
        subdir = os.path.join(args.out, label.replace(":", "_"))
        experiment.write_artifacts(subdir, cfg, outcome)
        image_row = next(r for r in outcome.rows if r.label == "reconstruction")
        lines.append(
            f"{label},{outcome.recon.iterations},"
            f"{image_row.psnr_db:.6f},{image_row.ssim:.6f}"
        )
        print(lines[-1])
    with open(os.path.join(args.out, "comparison.csv"), "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote comparison to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sphmri",
        description="Parallel-MRI reconstruction with basis-expanded coil sensitivities",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one reconstruction experiment")
    run.add_argument("--config", required=True, help="INI config path")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", type=int, default=None, help="master seed override")
    run.add_argument("--iters", type=int, default=None, help="iteration override")
    run.set_defaults(func=_cmd_run)

    basis = sub.add_parser("basis", help="render the sensitivity basis functions")
    basis.add_argument("--config", required=True, help="INI config path")
    basis.add_argument("--out", required=True, help="output directory")
    basis.set_defaults(func=_cmd_basis)

    compare = sub.add_parser("compare", help="run several configs on the same data")
    compare.add_argument("configs", nargs="+", help="INI config paths")
    compare.add_argument("--out", required=True, help="output directory")
    compare.add_argument("--seed", type=int, default=None, help="master seed override")
    compare.add_argument("--iters", type=int, default=None, help="iteration override")
    compare.set_defaults(func=_cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalDivergence as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except fileio.FileFormatError as exc:
        print(f"file format error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
