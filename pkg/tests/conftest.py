import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "numeric", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("numeric")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def tiny_setup():
    """Shared N=16 problem: grid, basis, mask, coils, phantom, data."""
    from sphmri import grid as G, mri as M, sphfuncs as sf

    n = 16
    g = G.ImageGrid(n)
    view = G.build_spherical_view(g)
    zeta = sf.wave_number(42.58, 1.2566e-6, 0.6, 50.0)
    basis = G.assemble_basis(view, zeta, 2)
    mask = M.make_spiral_mask(n, 0.4, turns=5, seed=3)
    coils, a_true = M.make_synthetic_coils(basis, 3, seed=7)
    phantom = M.make_phantom(n)
    kspace = M.forward(phantom.values.astype(complex), coils, mask)
    return {
        "n": n,
        "grid": g,
        "view": view,
        "zeta": zeta,
        "basis": basis,
        "mask": mask,
        "coils": coils,
        "a_true": a_true,
        "phantom": phantom,
        "kspace": kspace,
    }
