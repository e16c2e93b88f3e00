"""Proximal maps of the objective terms.

Every function returns ``argmin_y  f(y) + ||y - x||^2 / (2 tau)`` for its
term ``f``; all of them are exact, none iterative.
"""

from __future__ import annotations

import numpy as np

from .mri import SamplingMask, dft2, idft2


def prox_data(
    x: np.ndarray, g: np.ndarray, mask: SamplingMask, alpha: float, tau: float
) -> np.ndarray:
    """Resolvent of the masked Fourier fidelity ``alpha/2 ||P F y - g||^2``.

    The unitary DFT diagonalizes the quadratic: sampled frequencies are
    blended with the measurement, unsampled ones pass through.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    x = np.asarray(x, dtype=complex)
    if alpha == 0:
        return x.copy()
    spectrum = dft2(x)
    weight = alpha * tau
    blended = np.where(
        mask.array, (spectrum + weight * g) / (1.0 + weight), spectrum
    )
    return idft2(blended)


def _shrink_magnitude(r: np.ndarray, threshold: float) -> np.ndarray:
    """Factor in [0, 1] scaling magnitudes ``r`` toward zero by ``threshold``."""
    safe = np.where(r > 0, r, 1.0)
    return np.where(r > 0, np.maximum(r - threshold, 0.0) / safe, 0.0)


def prox_soft_threshold(x: np.ndarray, alpha: float, tau: float) -> np.ndarray:
    """Complex soft thresholding: shrink each magnitude by ``alpha * tau``.

    Resolvent of ``alpha * sum |x_l|``; phases are preserved, entries whose
    magnitude falls below the threshold vanish exactly.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    x = np.asarray(x, dtype=complex)
    if alpha == 0:
        return x.copy()
    return x * _shrink_magnitude(np.abs(x), alpha * tau)


def prox_gradient_field(
    p: np.ndarray, alpha: float, tau: float, pixelwise: bool = True
) -> np.ndarray:
    """Shrinkage of a 2-component gradient field.

    ``pixelwise=True`` is the resolvent of the isotropic total variation
    ``alpha * sum_i |p_i|_2`` (block soft thresholding of each pixel's
    2-vector).  ``pixelwise=False`` shrinks the field's global 2-norm
    instead, the resolvent of ``alpha * ||p||_2`` taken over the whole
    field.  The leading axis of ``p`` indexes the gradient components.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    p = np.asarray(p, dtype=complex)
    if alpha == 0:
        return p.copy()
    threshold = alpha * tau
    if pixelwise:
        r = np.sqrt(np.sum(np.abs(p) ** 2, axis=0))
        return p * _shrink_magnitude(r, threshold)[None]
    total = float(np.sqrt(np.sum(np.abs(p) ** 2)))
    if total == 0:
        return p.copy()
    return p * (max(total - threshold, 0.0) / total)
