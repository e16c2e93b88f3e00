"""Special functions on the sphere, built from recurrences.

Everything in this module is dtype-polymorphic over numpy arrays: scalars go
in, scalars come out; arrays broadcast elementwise.  The spherical Bessel
routines accept complex arguments because the radial argument of the coil
basis is ``zeta * rho`` with a complex wave number ``zeta``.

Conventions
-----------
* Associated Legendre functions carry no Condon-Shortley phase; the
  ``(-1)^m`` phase sits in the spherical-harmonic normalization instead.
* Spherical harmonics are orthonormal on the unit sphere:
  ``integral |Y_n^m|^2 dOmega = 1``.
* The linear basis index is ``l = n^2 + n + m + 1`` (1-based), enumerating
  ``(n, m)`` as (0,0), (1,-1), (1,0), (1,1), (2,-2), ...
"""

from __future__ import annotations

import cmath
import math

import numpy as np

# Below this magnitude the seed formulas sin(x)/x, ... lose digits to
# cancellation, so a truncated power series takes over.
SMALL_ARGUMENT_CUTOFF = 1e-6

# The upward three-term recurrence amplifies the second (singular) solution
# of the Bessel equation, so relative accuracy at order n is near machine
# precision only while the argument magnitude stays >= roughly n.  Below
# that the returned high-order values are small in absolute terms but carry
# growing relative error.  The basis cap reflects where the sweep has been
# validated for the argument ranges this package produces.
MAX_STABLE_ORDER = 8


def wave_number(omega: float, mu: float, sigma: float, epsilon: float) -> complex:
    """Complex wave number of a lossy medium.

    Principal square root of ``epsilon*mu*omega**2 - 1j*sigma*omega*mu``,
    which places the result in the right half plane (``Re >= 0``).
    """
    return cmath.sqrt(epsilon * mu * omega**2 - 1j * sigma * omega * mu)


def spherical_bessel_seed(x):
    """First two spherical Bessel functions of the first kind.

    Returns ``(j0, j1)`` evaluated elementwise.  Near zero the closed forms
    ``sin(x)/x`` and ``sin(x)/x^2 - cos(x)/x`` are replaced by their leading
    series terms ``1 - x^2/6`` and ``x/3``.
    """
    x = np.asarray(x, dtype=complex)
    small = np.abs(x) < SMALL_ARGUMENT_CUTOFF
    xs = np.where(small, 1.0, x)
    j0 = np.where(small, 1.0 - x * x / 6.0, np.sin(xs) / xs)
    j1 = np.where(small, x / 3.0, np.sin(xs) / xs**2 - np.cos(xs) / xs)
    if j0.ndim == 0:
        return j0[()], j1[()]
    return j0, j1


def spherical_bessel_sequence(x, n_max: int):
    """Spherical Bessel functions ``j_0 .. j_n_max`` by upward recurrence.

    Uses ``j_{n+1}(x) = (2n+1)/x * j_n(x) - j_{n-1}(x)`` on top of the seed
    pair.  Entries where ``|x|`` falls below the series cutoff get the exact
    small-argument limit ``x^n / (2n+1)!!`` instead, so the recurrence never
    divides by a tiny argument.

    Parameters
    ----------
    x : array_like, real or complex
    n_max : int
        Highest order to return.  The upward sweep holds full relative
        accuracy while ``|x|`` is at least about ``n``; for smaller
        arguments the error at order ``n`` grows like
        ``eps * (2n-1)!! / |x|**n`` (seed roundoff amplified by the
        dominant solution).  ``MAX_STABLE_ORDER`` marks the validated
        ceiling for the argument ranges this package produces.

    Returns
    -------
    ndarray with shape ``(n_max + 1,) + shape(x)``, complex.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    x = np.asarray(x, dtype=complex)
    out = np.empty((n_max + 1,) + x.shape, dtype=complex)
    small = np.abs(x) < SMALL_ARGUMENT_CUTOFF
    any_small = bool(small.any())
    xs = np.where(small, 1.0, x)
    j0 = np.where(small, 1.0 - x * x / 6.0, np.sin(xs) / xs)
    out[0] = j0
    if n_max == 0:
        return out
    out[1] = np.where(small, x / 3.0, np.sin(xs) / xs**2 - np.cos(xs) / xs)
    double_factorial = 3.0  # (2n+1)!! at n = 1
    for n in range(1, n_max):
        nxt = (2.0 * n + 1.0) / xs * out[n] - out[n - 1]
        double_factorial *= 2.0 * n + 3.0
        if any_small:
            nxt = np.where(small, x ** (n + 1) / double_factorial, nxt)
        out[n + 1] = nxt
    return out


def _negative_degree_factor(n: int, m: int) -> float:
    # P_n^{-m} = (-1)^m (n-m)!/(n+m)! P_n^m for m >= 0
    return (-1.0) ** m * math.factorial(n - m) / math.factorial(n + m)


def assoc_legendre_table(x, n_max: int) -> dict:
    """Associated Legendre functions ``P_n^m(x)`` for all ``n <= n_max``.

    Builds the whole triangle ``{(n, m): value}`` with ``|m| <= n`` in one
    upward sweep of the four-term recurrence

        P_n^m = 2x P_{n-1}^m - P_{n-2}^m + (2m-1) sqrt(1-x^2) P_{n-1}^{m-1},

    seeded with ``P_0^0 = 1``, ``P_1^0 = x``, ``P_1^1 = sqrt(1-x^2)`` and
    ``P_1^{-1} = -sqrt(1-x^2)/2``.  Entries with ``|m| > n`` are identically
    zero and simply absent from the table; the recurrence treats them as 0.
    Negative degrees are filled level by level from the reflection
    ``P_n^{-m} = (-1)^m (n-m)!/(n+m)! P_n^m`` because the ``m = 0`` step at
    level ``n`` reaches back to ``P_{n-1}^{-1}``.

    No Condon-Shortley phase.  ``x`` must satisfy ``|x| <= 1``.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise ValueError("associated Legendre argument must satisfy |x| <= 1")
    s = np.sqrt(1.0 - x * x)

    table = {(0, 0): np.ones_like(x)}
    if n_max == 0:
        return table
    table[(1, 0)] = x.copy()
    table[(1, 1)] = s.copy()
    table[(1, -1)] = -0.5 * s

    zero = np.zeros_like(x)
    for n in range(2, n_max + 1):
        for m in range(0, n + 1):
            p1 = table.get((n - 1, m), zero)
            p2 = table.get((n - 2, m), zero)
            q = table.get((n - 1, m - 1), zero)
            table[(n, m)] = 2.0 * x * p1 - p2 + (2.0 * m - 1.0) * s * q
        for m in range(1, n + 1):
            table[(n, -m)] = _negative_degree_factor(n, m) * table[(n, m)]
    return table


def assoc_legendre(n: int, m: int, x):
    """Single associated Legendre function ``P_n^m(x)`` (zero when |m| > n)."""
    if n < 0:
        raise ValueError("order n must be nonnegative")
    if abs(m) > n:
        return np.zeros_like(np.asarray(x, dtype=float))
    return assoc_legendre_table(x, n)[(n, m)]


def _harmonic_norm(n: int, m: int) -> float:
    # (-1)^m sqrt((2n+1)/(4 pi) * (n-m)!/(n+m)!), factorials via lgamma so
    # large n stays finite.
    log_norm = 0.5 * (
        math.log(2 * n + 1)
        - math.log(4.0 * math.pi)
        + math.lgamma(n - m + 1)
        - math.lgamma(n + m + 1)
    )
    return (-1.0) ** m * math.exp(log_norm)


def spherical_harmonic(n: int, m: int, theta, phi):
    """Orthonormal spherical harmonic ``Y_n^m(theta, phi)``.

    ``theta`` is the polar angle in ``[0, pi]``, ``phi`` the azimuth.  The
    Condon-Shortley phase ``(-1)^m`` is included in the normalization.
    """
    if abs(m) > n:
        raise ValueError("degree m must satisfy |m| <= n")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    p = assoc_legendre(n, m, np.cos(theta))
    out = _harmonic_norm(n, m) * p * np.exp(1j * m * phi)
    if out.ndim == 0:
        return out[()]
    return out


def basis_order_degree(l: int) -> tuple[int, int]:
    """Decode the 1-based linear basis index into ``(n, m)``.

    Inverse of ``l = n^2 + n + m + 1``; uses integer sqrt so it is exact for
    arbitrarily large indices.
    """
    if l < 1:
        raise ValueError("linear basis index starts at 1")
    n = math.isqrt(l - 1)
    m = l - 1 - n * n - n
    return n, m


def basis_linear_index(n: int, m: int) -> int:
    """Map ``(n, m)`` with ``|m| <= n`` to the 1-based linear basis index."""
    if n < 0 or abs(m) > n:
        raise ValueError("need n >= 0 and |m| <= n")
    return n * n + n + m + 1


def basis_size(n_max: int) -> int:
    """Number of basis functions with order ``<= n_max``: ``(n_max + 1)^2``."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    return (n_max + 1) ** 2


def basis_function(l: int, zeta: complex, rho, theta, phi):
    """Sampled coil-basis function ``j_n(zeta * rho) * Y_n^m(theta, phi)``.

    ``(n, m)`` come from the linear index ``l``.
    """
    n, m = basis_order_degree(l)
    radial = spherical_bessel_sequence(zeta * np.asarray(rho, dtype=float), n)[n]
    return radial * spherical_harmonic(n, m, theta, phi)
