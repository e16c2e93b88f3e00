"""Parallel-MRI reconstruction with coil sensitivities in a spherical basis.

The package splits into small layers:

* :mod:`sphmri.sphfuncs` - recurrence-based special functions and the coil
  sensitivity basis ``j_n(zeta * rho) * Y_n^m(theta, phi)``.
* :mod:`sphmri.grid` - slice geometry and the sampled basis matrix.
* :mod:`sphmri.mri` - masked multi-coil Fourier model plus synthetic data.
* :mod:`sphmri.operators`, :mod:`sphmri.prox`, :mod:`sphmri.admm` - the
  nonlinear splitting solver reconstructing image and coils jointly.
* :mod:`sphmri.metrics`, :mod:`sphmri.experiment`, :mod:`sphmri.cli` -
  evaluation and the reproducible experiment harness.
"""

from .admm import NumericalDivergence, SolveResult, SolverConfig, SolverState, solve
from .config import ConfigError, ExperimentConfig, load_config
from .grid import BasisTable, ImageGrid, assemble_basis, build_spherical_view, synthesize_coils
from .metrics import QualityReport, psnr, quality_report, ssim
from .mri import Phantom, SamplingMask, adjoint, forward, make_phantom, make_spiral_mask
from .operators import (
    BlockVector,
    DirectCoilModel,
    RegularizationParams,
    SphericalCoilModel,
    operator_norm_estimate,
)
from .sphfuncs import (
    assoc_legendre,
    basis_function,
    basis_linear_index,
    basis_order_degree,
    spherical_bessel_sequence,
    spherical_harmonic,
    wave_number,
)

__all__ = [
    "BasisTable",
    "BlockVector",
    "ConfigError",
    "DirectCoilModel",
    "ExperimentConfig",
    "ImageGrid",
    "NumericalDivergence",
    "Phantom",
    "QualityReport",
    "RegularizationParams",
    "SamplingMask",
    "SolveResult",
    "SolverConfig",
    "SolverState",
    "SphericalCoilModel",
    "adjoint",
    "assemble_basis",
    "assoc_legendre",
    "basis_function",
    "basis_linear_index",
    "basis_order_degree",
    "build_spherical_view",
    "forward",
    "load_config",
    "make_phantom",
    "make_spiral_mask",
    "operator_norm_estimate",
    "psnr",
    "quality_report",
    "solve",
    "spherical_bessel_sequence",
    "spherical_harmonic",
    "ssim",
    "synthesize_coils",
    "wave_number",
]

__version__ = "0.1.0"
