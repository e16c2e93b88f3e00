"""End-to-end synthetic experiments: data synthesis, solve, evaluation.

The pipeline is deterministic given a config: every random draw (coils,
mask trimming, noise, solver norm probes) uses its own named seed from the
config, so two runs of the same manifest produce identical arrays and
identical metric files.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import admm, fileio, metrics, sphfuncs
from .config import ExperimentConfig, config_to_ini_text
from .grid import BasisTable, ImageGrid, SphericalView, assemble_basis, build_spherical_view, split_coefficients
from .mri import (
    Phantom,
    SamplingMask,
    adjoint,
    add_noise,
    forward,
    make_phantom,
    make_spiral_mask,
    make_synthetic_coils,
    perturb_coils,
)
from .operators import BlockVector, DirectCoilModel, RegularizationParams, SphericalCoilModel


@dataclass
class ExperimentData:
    """Everything the reconstruction consumes, plus the ground truth."""

    config: ExperimentConfig
    grid: ImageGrid
    view: SphericalView
    zeta: complex
    basis: BasisTable
    truth_basis: BasisTable
    phantom: Phantom
    coils: np.ndarray
    coil_coefficients: np.ndarray | None
    mask: SamplingMask
    kspace: np.ndarray


@dataclass
class ReconstructionResult:
    v: BlockVector
    coils: np.ndarray
    coefficients: np.ndarray | None
    history: list
    iterations: int
    zero_filled: np.ndarray

    @property
    def image(self) -> np.ndarray:
        return self.v[0]


@dataclass
class MetricsRow:
    target: str
    label: str
    psnr_db: float
    ssim: float


@dataclass
class ExperimentOutcome:
    data: ExperimentData
    recon: ReconstructionResult
    rows: list[MetricsRow] = field(default_factory=list)


def build_data(cfg: ExperimentConfig) -> ExperimentData:
    """Synthesize (or load) phantom, coils, mask and noisy measurements."""
    cfg.validate()
    grid = ImageGrid(cfg.grid.n, cfg.grid.step, cfg.grid.z0)
    view = build_spherical_view(grid)
    zeta = sphfuncs.wave_number(
        cfg.physics.omega, cfg.physics.mu, cfg.physics.sigma, cfg.physics.epsilon
    )

    n_build = max(cfg.model.n_tilde, cfg.coils.n_true)
    basis_full = assemble_basis(view, zeta, n_build)
    basis = basis_full.truncated(cfg.model.n_tilde)
    truth_basis = basis_full.truncated(cfg.coils.n_true)

    if cfg.coils.files:
        paths = [p.strip() for p in cfg.coils.files.split(",") if p.strip()]
        coils = np.stack([fileio.load_complex_image(p) for p in paths])
        if coils.shape != (len(paths), grid.n, grid.n):
            raise ValueError("coil files do not match the grid size")
        coeffs = None
    else:
        coils, coeffs = make_synthetic_coils(
            truth_basis,
            cfg.coils.count,
            seed=cfg.coils.seed,
            magnitude_decay=cfg.coils.magnitude_decay,
        )

    if cfg.perturbation.gamma > 0:
        amplitude = cfg.perturbation.gamma * float(np.mean(np.abs(coils)))
        coils = perturb_coils(coils, truth_basis, amplitude)

    if cfg.phantom.file:
        values = fileio.load_real_csv(cfg.phantom.file)
        phantom = Phantom(values=values, labels=np.zeros_like(values, dtype=int))
        if phantom.values.shape != (grid.n, grid.n):
            raise ValueError("phantom file does not match the grid size")
    else:
        phantom = make_phantom(grid.n)

    if cfg.mask.file:
        mask = SamplingMask(fileio.load_mask(cfg.mask.file))
        if mask.n != grid.n:
            raise ValueError("mask file does not match the grid size")
    else:
        mask = make_spiral_mask(
            grid.n, cfg.mask.fraction, turns=cfg.mask.turns, seed=cfg.mask.seed
        )

    clean = forward(phantom.values.astype(complex), coils, mask)
    kspace = add_noise(clean, mask, cfg.noise.sigma, seed=cfg.noise.seed)

    return ExperimentData(
        config=cfg,
        grid=grid,
        view=view,
        zeta=zeta,
        basis=basis,
        truth_basis=truth_basis,
        phantom=phantom,
        coils=coils,
        coil_coefficients=coeffs,
        mask=mask,
        kspace=kspace,
    )


def build_model(cfg: ExperimentConfig, data: ExperimentData):
    params = RegularizationParams(
        alpha_data=np.asarray(cfg.regularization.alpha_data, dtype=float),
        alpha_tv=cfg.regularization.alpha_tv,
        alpha_coeff=cfg.regularization.alpha_coeff,
    )
    if cfg.model.kind == "spherical":
        return SphericalCoilModel(
            data.basis,
            data.mask,
            data.kspace,
            params,
            tv_pixelwise=cfg.regularization.tv_pixelwise,
        )
    return DirectCoilModel(
        data.mask,
        data.kspace,
        params,
        tv_pixelwise=cfg.regularization.tv_pixelwise,
        coil_prox_pixelwise=cfg.regularization.coil_prox_pixelwise,
    )


def reconstruct(cfg: ExperimentConfig, data: ExperimentData) -> ReconstructionResult:
    """Run the solver on the synthesized data."""
    model = build_model(cfg, data)
    solver_cfg = admm.SolverConfig(
        max_iters=cfg.solver.iters,
        tau_v=cfg.solver.tau_v,
        tau_q=cfg.solver.tau_q,
        delta=cfg.solver.delta,
        step_rule=cfg.solver.step_rule,
        log_every=cfg.solver.log_every,
        stop_tol=cfg.solver.stop_tol,
        norm_safety=cfg.solver.norm_safety,
        norm_iters=cfg.solver.norm_iters,
        norm_seed=cfg.solver.norm_seed,
    )
    result = admm.solve(solver_cfg, model)

    if cfg.model.kind == "spherical":
        coefficients = result.v[1].copy()
        coils = model.coils_of(result.v)
    else:
        coefficients = None
        coils = result.v[1].copy()

    zero_filled = adjoint(data.kspace, data.coils, data.mask)
    return ReconstructionResult(
        v=result.v,
        coils=coils,
        coefficients=coefficients,
        history=result.history,
        iterations=result.iterations,
        zero_filled=zero_filled,
    )


def evaluate(data: ExperimentData, recon: ReconstructionResult) -> list[MetricsRow]:
    """Quality of the reconstruction and of the zero-filled baseline."""
    rows = []
    ref = data.phantom.values
    q = metrics.quality_report(recon.image, ref)
    rows.append(MetricsRow("image", "reconstruction", q.psnr_db, q.ssim))
    qz = metrics.quality_report(recon.zero_filled, ref)
    rows.append(MetricsRow("image", "zero_filled", qz.psnr_db, qz.ssim))
    for j in range(data.coils.shape[0]):
        qc = metrics.quality_report(recon.coils[j], data.coils[j])
        rows.append(MetricsRow("coil", f"coil_{j + 1}", qc.psnr_db, qc.ssim))
    return rows


def run_experiment(cfg: ExperimentConfig) -> ExperimentOutcome:
    data = build_data(cfg)
    recon = reconstruct(cfg, data)
    rows = evaluate(data, recon)
    return ExperimentOutcome(data=data, recon=recon, rows=rows)


def metrics_csv_text(rows: list[MetricsRow]) -> str:
    lines = ["target,label,psnr_db,ssim"]
    for r in rows:
        lines.append(f"{r.target},{r.label},{r.psnr_db:.6f},{r.ssim:.6f}")
    return "\n".join(lines) + "\n"


def write_artifacts(outdir, cfg: ExperimentConfig, outcome: ExperimentOutcome) -> None:
    """Write images, tables and the manifest for one finished run.

    Everything except ``history.csv`` (whose timing column is wall clock)
    is byte-reproducible across runs of the same manifest.
    """
    os.makedirs(outdir, exist_ok=True)
    data, recon = outcome.data, outcome.recon

    with open(os.path.join(outdir, "manifest.ini"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(config_to_ini_text(cfg))

    fileio.save_complex_image(os.path.join(outdir, "reconstruction.cimg"), recon.image)
    fileio.save_magnitude_png(os.path.join(outdir, "reconstruction.png"), recon.image)
    fileio.save_complex_image(os.path.join(outdir, "zero_filled.cimg"), recon.zero_filled)
    fileio.save_magnitude_png(os.path.join(outdir, "zero_filled.png"), recon.zero_filled)
    for j in range(recon.coils.shape[0]):
        stem = os.path.join(outdir, f"coil_{j + 1:02d}")
        fileio.save_complex_image(stem + ".cimg", recon.coils[j])
        fileio.save_magnitude_png(stem + ".png", recon.coils[j])

    fileio.save_real_csv(os.path.join(outdir, "phantom.csv"), data.phantom.values)
    fileio.save_magnitude_png(os.path.join(outdir, "phantom.png"), data.phantom.values)
    fileio.save_mask_png(os.path.join(outdir, "mask.png"), data.mask.array)
    fileio.save_mask_png(
        os.path.join(outdir, "mask_view.png"), np.fft.fftshift(data.mask.array)
    )

    if recon.coefficients is not None:
        table = np.abs(split_coefficients(recon.coefficients, outcome.data.basis.l_max))
        header = ",".join(f"l{l}" for l in range(1, outcome.data.basis.l_max + 1))
        fileio.save_real_csv(
            os.path.join(outdir, "coefficients.csv"), table, header=header
        )

    with open(os.path.join(outdir, "metrics.csv"), "w", encoding="ascii", newline="\n") as fh:
        fh.write(metrics_csv_text(outcome.rows))

    with open(os.path.join(outdir, "history.csv"), "w", encoding="ascii", newline="\n") as fh:
        fh.write(admm.history_csv(recon.history))
