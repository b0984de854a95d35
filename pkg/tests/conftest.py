import numpy as np
import pytest

from lplab.grid import (SpectralField, band_limit_ball, field_from_coef,
                        leray_project, make_grid, symmetrize_real)


def random_scalar_field(grid, seed, band):
    """Mean-free, conjugate-symmetric scalar field, ball band-limited."""
    rng = np.random.default_rng(seed)
    shape = (grid.n,) * grid.dim
    coef = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    f = band_limit_ball(field_from_coef(grid, coef), band)
    f.coef[(slice(None),) + (0,) * grid.dim] = 0.0
    return symmetrize_real(f)


def random_divfree_field(grid, seed, band, decay=None):
    """Mean-free, real, divergence-free vector field."""
    rng = np.random.default_rng(seed)
    shape = (grid.dim,) + (grid.n,) * grid.dim
    coef = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    if decay is not None:
        radii = np.sqrt(sum(k.astype(float) ** 2 for k in grid.k_components()))
        coef = coef * np.exp(-radii ** 2 / (2.0 * decay))[None]
    f = band_limit_ball(SpectralField(grid, coef, "vector"), band)
    f.coef[(slice(None),) + (0,) * grid.dim] = 0.0
    return symmetrize_real(leray_project(f))


@pytest.fixture(scope="session")
def grid64():
    return make_grid(2, 64, 2 * np.pi)


@pytest.fixture(scope="session")
def grid256():
    return make_grid(2, 256, 2 * np.pi)


@pytest.fixture(scope="session")
def grid16_3d():
    return make_grid(3, 16, 2 * np.pi)
