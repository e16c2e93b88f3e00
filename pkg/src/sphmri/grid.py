"""Image-plane geometry and the sampled coil-sensitivity basis.

The imaging slice is a square N x N grid at height ``z0`` above the origin.
Pixel ``(i, j)`` sits at ``(x_i, y_j, z0)`` with

    x_i = 2 * step * i / N - step,   i = 1 .. N

and the same rule for ``y_j``.  Flattened pixel vectors are column-major
(first index fastest), so column ``l`` of the basis matrix reshapes back to
an image with ``unflatten_pixels``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sphfuncs


def flatten_pixels(image: np.ndarray) -> np.ndarray:
    """Flatten an N x N image to length N^2, first index fastest."""
    return np.reshape(image, -1, order="F")


def unflatten_pixels(vec: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`flatten_pixels`."""
    return np.reshape(vec, (n, n), order="F")


class ImageGrid:
    """Pixel coordinates of the imaging slice.

    Parameters
    ----------
    n : int
        Pixels per side.
    step : float
        Half-extent of the field of view; the default grid spans
        ``(-step, step]`` in both directions.
    z0 : float
        Slice height.  Must be nonzero so every pixel has a well-defined
        polar angle (the grid never contains the coordinate origin).
    x, y : array_like, optional
        Explicit coordinate vectors of length ``n`` overriding the uniform
        arrangement.
    """

    def __init__(self, n: int, step: float = 10.0, z0: float = 0.5, x=None, y=None):
        if n < 1:
            raise ValueError("grid needs at least one pixel per side")
        if z0 == 0:
            raise ValueError("z0 must be nonzero so the polar angle is defined")
        self.n = int(n)
        self.step = float(step)
        self.z0 = float(z0)
        idx = np.arange(1, self.n + 1, dtype=float)
        default = 2.0 * self.step * idx / self.n - self.step
        self.x = default if x is None else np.asarray(x, dtype=float)
        self.y = default.copy() if y is None else np.asarray(y, dtype=float)
        if self.x.shape != (self.n,) or self.y.shape != (self.n,):
            raise ValueError("coordinate vectors must have length n")

    @property
    def pixel_count(self) -> int:
        return self.n * self.n


@dataclass
class SphericalView:
    """Spherical coordinates of every pixel: radius, polar angle, azimuth."""

    rho: np.ndarray
    theta: np.ndarray
    phi: np.ndarray


def build_spherical_view(grid: ImageGrid) -> SphericalView:
    """Spherical coordinates of the slice pixels.

    ``rho >= |z0| > 0`` everywhere and ``theta = arccos(z0 / rho)`` stays in
    ``(0, pi)``, so none of the downstream special functions see a singular
    point.
    """
    xx, yy = np.meshgrid(grid.x, grid.y, indexing="ij")
    rho = np.sqrt(xx * xx + yy * yy + grid.z0 * grid.z0)
    theta = np.arccos(grid.z0 / rho)
    phi = np.arctan2(yy, xx)
    return SphericalView(rho=rho, theta=theta, phi=phi)


@dataclass
class BasisTable:
    """Sampled basis matrix: column ``l`` holds basis function ``l`` flattened.

    ``matrix`` has shape ``(n*n, basis_size(n_tilde))`` and complex dtype.
    """

    matrix: np.ndarray
    n: int
    n_tilde: int
    zeta: complex

    @property
    def l_max(self) -> int:
        return self.matrix.shape[1]

    def column_image(self, l: int) -> np.ndarray:
        """Basis function ``l`` reshaped to the image grid."""
        if not 1 <= l <= self.l_max:
            raise ValueError("basis index out of range")
        return unflatten_pixels(self.matrix[:, l - 1], self.n)

    def truncated(self, n_tilde: int) -> "BasisTable":
        """View of the table keeping only orders ``<= n_tilde``."""
        size = sphfuncs.basis_size(n_tilde)
        if size > self.l_max:
            raise ValueError("cannot truncate to a larger basis")
        return BasisTable(self.matrix[:, :size], self.n, n_tilde, self.zeta)


def assemble_basis(view: SphericalView, zeta: complex, n_tilde: int, n: int | None = None) -> BasisTable:
    """Evaluate all basis functions of order ``<= n_tilde`` on the grid.

    Radial parts come from one Bessel sweep over the whole grid, angular
    parts from one Legendre table per grid, so the cost is one recurrence
    pass plus ``(n_tilde + 1)^2`` elementwise products.

    ``n_tilde`` is capped at the validated stability range of the upward
    Bessel recurrence.
    """
    if not 0 <= n_tilde <= sphfuncs.MAX_STABLE_ORDER:
        raise ValueError(
            f"basis order must lie in [0, {sphfuncs.MAX_STABLE_ORDER}]"
        )
    if n is None:
        n = view.rho.shape[0]
    if view.rho.shape != (n, n):
        raise ValueError("spherical view does not match the grid size")

    radial = sphfuncs.spherical_bessel_sequence(zeta * view.rho, n_tilde)
    legendre = sphfuncs.assoc_legendre_table(np.cos(view.theta), n_tilde)

    size = sphfuncs.basis_size(n_tilde)
    matrix = np.empty((n * n, size), dtype=complex)
    for order in range(n_tilde + 1):
        for degree in range(-order, order + 1):
            norm = sphfuncs._harmonic_norm(order, degree)
            angular = norm * legendre[(order, degree)] * np.exp(1j * degree * view.phi)
            col = sphfuncs.basis_linear_index(order, degree) - 1
            matrix[:, col] = flatten_pixels(radial[order] * angular)
    return BasisTable(matrix=matrix, n=n, n_tilde=n_tilde, zeta=complex(zeta))


def split_coefficients(a: np.ndarray, l_max: int) -> np.ndarray:
    """Reshape a stacked coefficient vector to one row per coil."""
    a = np.asarray(a)
    if a.size % l_max != 0:
        raise ValueError("coefficient vector length must be a multiple of the basis size")
    return a.reshape(-1, l_max)


def synthesize_coils(basis: BasisTable, a: np.ndarray) -> np.ndarray:
    """Coil sensitivity images from stacked expansion coefficients.

    ``a`` holds ``J * l_max`` complex entries, coil-major.  Returns an array
    of shape ``(J, n, n)``.
    """
    coeff = split_coefficients(np.asarray(a, dtype=complex), basis.l_max)
    flat = coeff @ basis.matrix.T
    coils = np.empty((coeff.shape[0], basis.n, basis.n), dtype=complex)
    for j in range(coeff.shape[0]):
        coils[j] = unflatten_pixels(flat[j], basis.n)
    return coils
