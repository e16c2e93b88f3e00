"""Subsampled multi-coil Fourier acquisition and synthetic test data.

All spectra use the unitary FFT convention (``norm="ortho"``) with the DC
sample at index ``[0, 0]``; sampling masks are stored in that same layout.
Use ``numpy.fft.fftshift`` only for display.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import BasisTable, synthesize_coils


def dft2(image: np.ndarray) -> np.ndarray:
    """Unitary 2-D DFT over the last two axes."""
    return np.fft.fft2(image, norm="ortho")


def idft2(spectrum: np.ndarray) -> np.ndarray:
    """Unitary 2-D inverse DFT over the last two axes."""
    return np.fft.ifft2(spectrum, norm="ortho")


@dataclass
class SamplingMask:
    """Boolean k-space sampling pattern, DC-at-corner layout."""

    array: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.array)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("mask must be a square 2-D array")
        self.array = arr.astype(bool)

    @property
    def n(self) -> int:
        return self.array.shape[0]

    @property
    def count(self) -> int:
        return int(self.array.sum())

    @property
    def fraction(self) -> float:
        return self.count / self.array.size


def _check_forward_shapes(u: np.ndarray, coils: np.ndarray, mask: SamplingMask):
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("image must be square")
    if coils.ndim != 3 or coils.shape[1:] != u.shape:
        raise ValueError("coils must be a (J, N, N) stack matching the image")
    if mask.array.shape != u.shape:
        raise ValueError("mask size does not match the image")


def forward(u: np.ndarray, coils: np.ndarray, mask: SamplingMask) -> np.ndarray:
    """Masked spectra of the coil-weighted image, one slice per coil."""
    u = np.asarray(u, dtype=complex)
    coils = np.asarray(coils, dtype=complex)
    _check_forward_shapes(u, coils, mask)
    return np.where(mask.array, dft2(u[None, :, :] * coils), 0.0)


def adjoint(g: np.ndarray, coils: np.ndarray, mask: SamplingMask) -> np.ndarray:
    """Adjoint of :func:`forward` under the real inner product.

    Sums ``conj(c_j) * IDFT2(mask * g_j)`` over coils; with ``g`` the raw
    measurements this is the zero-filled composite image.
    """
    g = np.asarray(g, dtype=complex)
    coils = np.asarray(coils, dtype=complex)
    if g.shape != coils.shape:
        raise ValueError("data and coil stacks must have the same shape")
    return np.sum(np.conj(coils) * idft2(np.where(mask.array, g, 0.0)), axis=0)


def _dilate8(mask: np.ndarray) -> np.ndarray:
    """One step of 8-neighborhood binary dilation, no wraparound."""
    out = mask.copy()
    out[1:, :] |= mask[:-1, :]
    out[:-1, :] |= mask[1:, :]
    out[:, 1:] |= mask[:, :-1]
    out[:, :-1] |= mask[:, 1:]
    out[1:, 1:] |= mask[:-1, :-1]
    out[:-1, :-1] |= mask[1:, 1:]
    out[1:, :-1] |= mask[:-1, 1:]
    out[:-1, 1:] |= mask[1:, :-1]
    return out


def make_spiral_mask(n: int, fraction: float, turns: int = 12, seed: int = 0) -> SamplingMask:
    """Spiral k-space sampling pattern hitting an exact sample budget.

    An Archimedean spiral centered on DC is rasterized, then grown by
    8-neighborhood dilation shells until the sample count reaches
    ``round(fraction * n * n)``.  The last shell is trimmed to land on the
    budget exactly; which of its pixels survive is decided by a seeded
    permutation, so the pattern is reproducible.  The returned mask is in
    DC-at-corner layout.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError("sampling fraction must lie in (0, 1]")
    if n < 2:
        raise ValueError("mask needs at least a 2 x 2 grid")
    target = int(round(fraction * n * n))
    target = max(target, 1)

    center = n // 2
    samples = max(8192, 64 * n * max(turns, 1))
    t = np.linspace(0.0, 1.0, samples)
    radius = t * (n / np.sqrt(2.0))
    angle = 2.0 * np.pi * turns * t
    ii = np.rint(center + radius * np.cos(angle)).astype(int)
    jj = np.rint(center + radius * np.sin(angle)).astype(int)
    keep = (ii >= 0) & (ii < n) & (jj >= 0) & (jj < n)

    base = np.zeros((n, n), dtype=bool)
    base[ii[keep], jj[keep]] = True

    rng = np.random.default_rng(seed)
    current = np.zeros((n, n), dtype=bool)
    shell = base
    while True:
        count = int(current.sum())
        gain = shell & ~current
        gain_count = int(gain.sum())
        if count + gain_count >= target:
            surplus = count + gain_count - target
            flat = np.flatnonzero(gain)
            if surplus > 0:
                drop = rng.permutation(flat)[:surplus]
                gain_flat = gain.ravel()
                gain_flat[drop] = False
                gain = gain_flat.reshape(n, n)
            current = current | gain
            break
        current = current | gain
        grown = _dilate8(current)
        if not (grown & ~current).any():
            # Fully saturated before reaching the budget; cannot happen for
            # fraction <= 1 but guards degenerate inputs.
            break
        shell = grown

    return SamplingMask(np.fft.ifftshift(current))


@dataclass
class Phantom:
    """Piecewise-constant test image plus its integer region labels."""

    values: np.ndarray
    labels: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]


# (cx, cy, semi_x, semi_y, angle_deg, value, label); later entries overwrite
# earlier ones, all coordinates in the unit square [-1, 1]^2.
_PHANTOM_ELLIPSES = (
    (0.00, 0.00, 0.86, 0.92, 0.0, 0.85, 1),
    (0.00, 0.00, 0.78, 0.84, 0.0, 0.60, 2),
    (0.00, 0.00, 0.66, 0.72, 0.0, 0.40, 3),
    (-0.18, -0.07, 0.13, 0.30, -16.0, 1.00, 4),
    (0.18, -0.07, 0.13, 0.30, 16.0, 1.00, 4),
    (0.00, 0.42, 0.15, 0.12, 0.0, 0.75, 5),
    (0.27, 0.30, 0.055, 0.055, 0.0, 0.25, 6),
    (-0.28, 0.27, 0.045, 0.08, 24.0, 0.10, 7),
)


def make_phantom(n: int) -> Phantom:
    """Deterministic multi-ellipse phantom with several intensity classes.

    Nested ellipses mimic a head slice: an outer shell, two interior tissue
    bands, a pair of bright ventricle-like lobes and a few small structures.
    Intensities span {0, 0.1, 0.25, 0.4, 0.6, 0.75, 0.85, 1.0}; the label
    image identifies which ellipse claimed each pixel (0 = background).
    """
    if n < 1:
        raise ValueError("phantom needs a positive size")
    coords = np.linspace(-1.0, 1.0, n)
    xx, yy = np.meshgrid(coords, coords, indexing="ij")
    values = np.zeros((n, n), dtype=float)
    labels = np.zeros((n, n), dtype=int)
    for cx, cy, sx, sy, ang, value, label in _PHANTOM_ELLIPSES:
        rad = np.deg2rad(ang)
        u = np.cos(rad) * (xx - cx) + np.sin(rad) * (yy - cy)
        v = -np.sin(rad) * (xx - cx) + np.cos(rad) * (yy - cy)
        inside = (u / sx) ** 2 + (v / sy) ** 2 <= 1.0
        values[inside] = value
        labels[inside] = label
    return Phantom(values=values, labels=labels)


def make_synthetic_coils(
    basis: BasisTable,
    coil_count: int,
    seed: int = 0,
    magnitude_decay: float = 0.3,
) -> tuple[np.ndarray, np.ndarray]:
    """Random smooth coil set drawn from the sensitivity basis.

    Coefficient magnitudes decay geometrically with the basis order
    (``magnitude_decay ** n``); phases are uniform except for the order-zero
    coefficient, which is kept positive real so the leading coefficient has
    a common orientation across coils.  The stack is rescaled so the largest
    sensitivity magnitude is 1.  Draws are retried (fresh randomness, same
    stream) in the unlikely event the sum-of-squares map nearly vanishes
    somewhere.

    Returns ``(coils, a)`` with ``coils`` of shape ``(J, n, n)`` and ``a``
    the stacked coefficient vector that generated them.
    """
    if coil_count < 1:
        raise ValueError("need at least one coil")
    orders = np.array(
        [_order_of_column(l) for l in range(1, basis.l_max + 1)], dtype=float
    )
    rng = np.random.default_rng(seed)
    for _ in range(16):
        magnitudes = magnitude_decay**orders
        phases = rng.uniform(0.0, 2.0 * np.pi, size=(coil_count, basis.l_max))
        phases[:, 0] = 0.0
        a = magnitudes[None, :] * np.exp(1j * phases)
        coils = synthesize_coils(basis, a.ravel())
        peak = np.abs(coils).max()
        if peak == 0:
            continue
        coils = coils / peak
        a = a / peak
        sos = np.sum(np.abs(coils) ** 2, axis=0)
        if sos.min() > 1e-12 * sos.max():
            return coils, a.ravel()
    raise RuntimeError("failed to draw a coil set with nonvanishing coverage")


def _order_of_column(l: int) -> int:
    from .sphfuncs import basis_order_degree

    return basis_order_degree(l)[0]


def perturb_coils(coils: np.ndarray, basis: BasisTable, gamma: float) -> np.ndarray:
    """Add ``gamma`` times the first basis function to every coil.

    Models a systematic deviation of the true sensitivities from the span
    the reconstruction assumes.  ``gamma`` is interpreted as an absolute
    amplitude; callers wanting "fraction of mean coil magnitude" scale it
    first.
    """
    coils = np.asarray(coils, dtype=complex)
    return coils + gamma * basis.column_image(1)[None, :, :]


def add_noise(g: np.ndarray, mask: SamplingMask, sigma: float, seed: int = 0) -> np.ndarray:
    """Add complex white Gaussian noise on the sampled k-space locations.

    ``sigma`` is the standard deviation per real component.  ``sigma = 0``
    returns a copy untouched.
    """
    if sigma < 0:
        raise ValueError("noise level must be nonnegative")
    g = np.asarray(g, dtype=complex)
    if sigma == 0:
        return g.copy()
    rng = np.random.default_rng(seed)
    noise = sigma * (
        rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    )
    return g + np.where(mask.array, noise, 0.0)
