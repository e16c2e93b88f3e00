"""Nonlinear imaging operators and their Jacobians.

The reconstruction unknown and the splitting variable are both tuples of
complex arrays, handled uniformly by :class:`BlockVector`.  All adjoints are
taken with respect to the real inner product ``Re sum(conj(x) * y)``, the
natural one when complex images are treated as pairs of real channels.

Two interchangeable model bundles cover the same solver interface:

* :class:`SphericalCoilModel` - unknowns are the image and stacked basis
  coefficients of every coil; the splitting operator maps to (coil-weighted
  images, image gradient, coefficients).
* :class:`DirectCoilModel` - unknowns are the image and the coil images
  themselves; the splitting operator maps to (coil-weighted images, image
  gradient, per-coil gradients).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import prox as prox_ops
from .grid import BasisTable, flatten_pixels, synthesize_coils
from .mri import SamplingMask, dft2


class BlockVector:
    """Immutable-ish tuple of complex ndarrays with vector-space algebra."""

    __slots__ = ("blocks",)

    def __init__(self, *blocks: np.ndarray):
        self.blocks = tuple(np.asarray(b, dtype=complex) for b in blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.blocks[k]

    def __add__(self, other: "BlockVector") -> "BlockVector":
        return BlockVector(*(a + b for a, b in zip(self.blocks, other.blocks, strict=True)))

    def __sub__(self, other: "BlockVector") -> "BlockVector":
        return BlockVector(*(a - b for a, b in zip(self.blocks, other.blocks, strict=True)))

    def __mul__(self, scalar: float) -> "BlockVector":
        return BlockVector(*(scalar * a for a in self.blocks))

    __rmul__ = __mul__

    def __neg__(self) -> "BlockVector":
        return BlockVector(*(-a for a in self.blocks))

    def copy(self) -> "BlockVector":
        return BlockVector(*(a.copy() for a in self.blocks))

    def real_dot(self, other: "BlockVector") -> float:
        """Real inner product ``Re sum(conj(self) * other)`` over all blocks."""
        total = 0.0
        for a, b in zip(self.blocks, other.blocks, strict=True):
            total += float(np.sum(a.real * b.real + a.imag * b.imag))
        return total

    def norm(self) -> float:
        return float(np.sqrt(sum(np.sum(np.abs(a) ** 2) for a in self.blocks)))

    def allfinite(self) -> bool:
        return all(np.isfinite(a).all() for a in self.blocks)

    @staticmethod
    def zeros_like(other: "BlockVector") -> "BlockVector":
        return BlockVector(*(np.zeros_like(a) for a in other.blocks))


def forward_gradient(u: np.ndarray) -> np.ndarray:
    """Forward-difference gradient with a zero last row/column.

    Returns shape ``(2,) + u.shape``: axis-0 differences first, axis-1
    differences second.
    """
    g = np.zeros((2,) + u.shape, dtype=complex)
    g[0, :-1, :] = u[1:, :] - u[:-1, :]
    g[1, :, :-1] = u[:, 1:] - u[:, :-1]
    return g


def gradient_adjoint(p: np.ndarray) -> np.ndarray:
    """Adjoint of :func:`forward_gradient` (negative divergence)."""
    out = np.zeros(p.shape[1:], dtype=complex)
    out[:-1, :] -= p[0, :-1, :]
    out[1:, :] += p[0, :-1, :]
    out[:, :-1] -= p[1, :, :-1]
    out[:, 1:] += p[1, :, :-1]
    return out


def total_variation(u: np.ndarray) -> float:
    """Isotropic total variation: sum of pixelwise gradient magnitudes."""
    g = forward_gradient(np.asarray(u, dtype=complex))
    return float(np.sum(np.sqrt(np.abs(g[0]) ** 2 + np.abs(g[1]) ** 2)))


@dataclass
class RegularizationParams:
    """Weights of the variational objective.

    ``alpha_data`` has one entry per coil (data-fidelity weights),
    ``alpha_tv`` multiplies the image total variation and ``alpha_coeff``
    the sparsity/smoothness penalty of the coil representation.  Zero
    disables a term; negatives are rejected.
    """

    alpha_data: np.ndarray
    alpha_tv: float
    alpha_coeff: float

    def __post_init__(self):
        self.alpha_data = np.atleast_1d(np.asarray(self.alpha_data, dtype=float))
        if np.any(self.alpha_data < 0) or self.alpha_tv < 0 or self.alpha_coeff < 0:
            raise ValueError("regularization weights must be nonnegative")

    def per_coil(self, coil_count: int) -> np.ndarray:
        if self.alpha_data.size == 1:
            return np.full(coil_count, float(self.alpha_data[0]))
        if self.alpha_data.size != coil_count:
            raise ValueError("alpha_data length must be 1 or the coil count")
        return self.alpha_data.astype(float)


class SphericalCoilModel:
    """Joint image/coefficient model with basis-expanded sensitivities.

    Unknown ``v = (u, a)``: the image ``u`` (N x N) and the stacked
    coefficient vector ``a`` (J * l_max).  The splitting operator is

        B(v) = (u * c_1(a), ..., u * c_J(a), grad u, a)

    packed as blocks ``(data (J,N,N), gradient (2,N,N), coefficients)``.
    The data blocks are bilinear in (u, a), the other two linear, so the
    Jacobian and its adjoint are cheap and exact.
    """

    split_block_names = ("data", "gradient", "coefficients")
    primal_block_names = ("image", "coefficients")

    def __init__(
        self,
        basis: BasisTable,
        mask: SamplingMask,
        data: np.ndarray,
        params: RegularizationParams,
        tv_pixelwise: bool = True,
    ):
        data = np.asarray(data, dtype=complex)
        if data.ndim != 3 or data.shape[1:] != (basis.n, basis.n):
            raise ValueError("data must be a (J, N, N) stack on the basis grid")
        if mask.array.shape != (basis.n, basis.n):
            raise ValueError("mask does not match the grid")
        self.basis = basis
        self.mask = mask
        self.data = data
        self.coil_count = data.shape[0]
        self.alpha_data = params.per_coil(self.coil_count)
        self.alpha_tv = float(params.alpha_tv)
        self.alpha_coeff = float(params.alpha_coeff)
        self.tv_pixelwise = bool(tv_pixelwise)

    # -- structure ---------------------------------------------------------

    @property
    def n(self) -> int:
        return self.basis.n

    def zero_primal(self) -> BlockVector:
        return BlockVector(
            np.zeros((self.n, self.n), dtype=complex),
            np.zeros(self.coil_count * self.basis.l_max, dtype=complex),
        )

    def default_init(self) -> BlockVector:
        """Zero image, all-ones coefficients."""
        return BlockVector(
            np.zeros((self.n, self.n), dtype=complex),
            np.ones(self.coil_count * self.basis.l_max, dtype=complex),
        )

    def coils_of(self, v: BlockVector) -> np.ndarray:
        return synthesize_coils(self.basis, v[1])

    # -- splitting operator and derivatives --------------------------------

    def apply(self, v: BlockVector) -> BlockVector:
        u, a = v[0], v[1]
        coils = synthesize_coils(self.basis, a)
        return BlockVector(u[None, :, :] * coils, forward_gradient(u), a.copy())

    def jacobian(self, v0: BlockVector, dv: BlockVector) -> BlockVector:
        u0, a0 = v0[0], v0[1]
        du, da = dv[0], dv[1]
        coils0 = synthesize_coils(self.basis, a0)
        dcoils = synthesize_coils(self.basis, da)
        data = du[None, :, :] * coils0 + u0[None, :, :] * dcoils
        return BlockVector(data, forward_gradient(du), da.copy())

    def jacobian_adjoint(self, v0: BlockVector, w: BlockVector) -> BlockVector:
        u0 = v0[0]
        coils0 = synthesize_coils(self.basis, v0[1])
        wd, wg, wc = w[0], w[1], w[2]
        u_part = np.sum(np.conj(coils0) * wd, axis=0) + gradient_adjoint(wg)
        weighted = np.conj(u0)[None, :, :] * wd
        flat = np.stack([flatten_pixels(weighted[j]) for j in range(self.coil_count)])
        a_part = (flat @ np.conj(self.basis.matrix)).ravel() + wc
        return BlockVector(u_part, a_part)

    # -- proximal map and objective ----------------------------------------

    def prox(self, q: BlockVector, tau: float) -> BlockVector:
        qd, qg, qc = q[0], q[1], q[2]
        data = np.empty_like(qd)
        for j in range(self.coil_count):
            data[j] = prox_ops.prox_data(
                qd[j], self.data[j], self.mask, self.alpha_data[j], tau
            )
        grad = prox_ops.prox_gradient_field(
            qg, self.alpha_tv, tau, pixelwise=self.tv_pixelwise
        )
        coeff = prox_ops.prox_soft_threshold(qc, self.alpha_coeff, tau)
        return BlockVector(data, grad, coeff)

    def objective_split(self, q: BlockVector) -> float:
        """Objective evaluated on a point of the split space."""
        qd, qg, qc = q[0], q[1], q[2]
        total = 0.0
        for j in range(self.coil_count):
            r = np.where(self.mask.array, dft2(qd[j]), 0.0) - self.data[j]
            total += 0.5 * self.alpha_data[j] * float(np.sum(np.abs(r) ** 2))
        total += self.alpha_tv * float(
            np.sum(np.sqrt(np.abs(qg[0]) ** 2 + np.abs(qg[1]) ** 2))
        )
        total += self.alpha_coeff * float(np.sum(np.abs(qc)))
        return total

    def objective(self, v: BlockVector) -> float:
        return self.objective_split(self.apply(v))


class DirectCoilModel:
    """Joint image/coil model without a sensitivity basis.

    Unknown ``v = (u, c)`` with the coil stack ``c`` (J, N, N) itself as the
    variable; smoothness of the coils is encouraged by penalizing their
    gradients.  Splitting blocks: ``(data (J,N,N), gradient (2,N,N),
    coil_gradients (J,2,N,N))``.
    """

    split_block_names = ("data", "gradient", "coil_gradients")
    primal_block_names = ("image", "coils")

    def __init__(
        self,
        mask: SamplingMask,
        data: np.ndarray,
        params: RegularizationParams,
        tv_pixelwise: bool = True,
        coil_prox_pixelwise: bool = False,
    ):
        data = np.asarray(data, dtype=complex)
        if data.ndim != 3 or data.shape[1] != data.shape[2]:
            raise ValueError("data must be a (J, N, N) stack")
        if mask.array.shape != data.shape[1:]:
            raise ValueError("mask does not match the data")
        self.mask = mask
        self.data = data
        self.coil_count = data.shape[0]
        self._n = data.shape[1]
        self.alpha_data = params.per_coil(self.coil_count)
        self.alpha_tv = float(params.alpha_tv)
        # The coil-gradient weights reuse the per-coil fidelity weights.
        self.alpha_coil = self.alpha_data.copy()
        self.tv_pixelwise = bool(tv_pixelwise)
        self.coil_prox_pixelwise = bool(coil_prox_pixelwise)

    @property
    def n(self) -> int:
        return self._n

    def zero_primal(self) -> BlockVector:
        return BlockVector(
            np.zeros((self.n, self.n), dtype=complex),
            np.zeros((self.coil_count, self.n, self.n), dtype=complex),
        )

    def default_init(self) -> BlockVector:
        """Zero image, all-ones coil sensitivities."""
        return BlockVector(
            np.zeros((self.n, self.n), dtype=complex),
            np.ones((self.coil_count, self.n, self.n), dtype=complex),
        )

    def coils_of(self, v: BlockVector) -> np.ndarray:
        return v[1].copy()

    def apply(self, v: BlockVector) -> BlockVector:
        u, c = v[0], v[1]
        cgrad = np.stack([forward_gradient(c[j]) for j in range(self.coil_count)])
        return BlockVector(u[None, :, :] * c, forward_gradient(u), cgrad)

    def jacobian(self, v0: BlockVector, dv: BlockVector) -> BlockVector:
        u0, c0 = v0[0], v0[1]
        du, dc = dv[0], dv[1]
        data = du[None, :, :] * c0 + u0[None, :, :] * dc
        cgrad = np.stack([forward_gradient(dc[j]) for j in range(self.coil_count)])
        return BlockVector(data, forward_gradient(du), cgrad)

    def jacobian_adjoint(self, v0: BlockVector, w: BlockVector) -> BlockVector:
        u0, c0 = v0[0], v0[1]
        wd, wg, wcg = w[0], w[1], w[2]
        u_part = np.sum(np.conj(c0) * wd, axis=0) + gradient_adjoint(wg)
        c_part = np.conj(u0)[None, :, :] * wd
        c_part = c_part + np.stack(
            [gradient_adjoint(wcg[j]) for j in range(self.coil_count)]
        )
        return BlockVector(u_part, c_part)

    def prox(self, q: BlockVector, tau: float) -> BlockVector:
        qd, qg, qcg = q[0], q[1], q[2]
        data = np.empty_like(qd)
        cgrad = np.empty_like(qcg)
        for j in range(self.coil_count):
            data[j] = prox_ops.prox_data(
                qd[j], self.data[j], self.mask, self.alpha_data[j], tau
            )
            cgrad[j] = prox_ops.prox_gradient_field(
                qcg[j], self.alpha_coil[j], tau, pixelwise=self.coil_prox_pixelwise
            )
        grad = prox_ops.prox_gradient_field(
            qg, self.alpha_tv, tau, pixelwise=self.tv_pixelwise
        )
        return BlockVector(data, grad, cgrad)

    def objective_split(self, q: BlockVector) -> float:
        qd, qg, qcg = q[0], q[1], q[2]
        total = 0.0
        for j in range(self.coil_count):
            r = np.where(self.mask.array, dft2(qd[j]), 0.0) - self.data[j]
            total += 0.5 * self.alpha_data[j] * float(np.sum(np.abs(r) ** 2))
            total += self.alpha_coil[j] * float(
                np.sqrt(np.sum(np.abs(qcg[j]) ** 2))
            )
        total += self.alpha_tv * float(
            np.sum(np.sqrt(np.abs(qg[0]) ** 2 + np.abs(qg[1]) ** 2))
        )
        return total

    def objective(self, v: BlockVector) -> float:
        return self.objective_split(self.apply(v))


def operator_norm_estimate(
    model,
    v0: BlockVector,
    iters: int = 30,
    seed: int = 0,
    start: BlockVector | None = None,
) -> tuple[float, BlockVector]:
    """Largest singular value of the Jacobian at ``v0`` by power iteration.

    Iterates ``x <- J* J x`` on the primal space; the returned estimate is
    ``||J x_k|| / ||x_k||``, which is nondecreasing in ``k`` for a fixed
    operator.  Returns the estimate together with the final primal vector so
    callers tracking a slowly varying operator can warm-start the next call.
    """
    if iters < 1:
        raise ValueError("need at least one iteration")
    if start is None:
        rng = np.random.default_rng(seed)
        start = BlockVector(
            *(
                rng.standard_normal(b.shape) + 1j * rng.standard_normal(b.shape)
                for b in model.zero_primal().blocks
            )
        )
    x = start
    estimate = 0.0
    for _ in range(iters):
        nx = x.norm()
        if nx == 0:
            return 0.0, x
        x = (1.0 / nx) * x
        y = model.jacobian(v0, x)
        estimate = y.norm()
        if estimate == 0:
            return 0.0, x
        x = model.jacobian_adjoint(v0, y)
    return estimate, x
