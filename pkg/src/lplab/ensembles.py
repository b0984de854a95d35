"""Seeded, reproducible field ensembles for the operator experiments.

Every field is a deterministic function of an integer seed (numpy PCG64
seeded with the full key tuple), is conjugate-symmetric (real physical
samples), mean-free, and band-limited to a ball of integer-lattice radius
``band`` (default: the grid's half-Nyquist bound, so bilinear products
never alias).

Profiles
--------
flat_binf       scalar; one random block per dyadic shell j = 0..j_top,
                each normalized to unit sup norm, so the field sits at
                unit scale in the (s=0, p=inf, q=inf) Besov norm.
white_l2        scalar; iid coefficients over the band, unit L^2 norm.
divfree_vector  vector, divergence-free; per-block sup norms 2^{j * slope}
                ("dyadic", slope 1 puts the field at unit (s=-1, p=inf,
                q=inf) scale), a Gaussian-decay spectrum ("smooth", for
                quadrature-convergence studies), or flat unit-L^2
                coefficients across the band ("white").
"""
from __future__ import annotations

import numpy as np

from .dyadic import PSI_SUPPORT
from .grid import (GridSpec, SpectralField, leray_project, lp_norm,
                   symmetrize_real, zero_field)

PROFILES = ("flat_binf", "white_l2", "divfree_vector")


def _rng(seed, *key):
    return np.random.default_rng((int(seed),) + tuple(int(x) for x in key))


def default_band(grid: GridSpec) -> int:
    return grid.half_nyquist_index


def top_block_index(grid: GridSpec, band: int) -> int:
    """Largest j whose annulus fits inside the band ball."""
    return int(np.floor(np.log2(band * grid.freq_step / PSI_SUPPORT[1])))


def bottom_block_index(grid: GridSpec) -> int:
    """Smallest j whose annulus reaches the first nonzero lattice shell."""
    return int(np.ceil(np.log2(grid.freq_step / PSI_SUPPORT[1])))


def _k_radii(grid: GridSpec) -> np.ndarray:
    return np.sqrt(sum(k.astype(float) ** 2 for k in grid.k_components()))


def _random_coef(rng, grid: GridSpec, ncomp: int) -> np.ndarray:
    shape = (ncomp,) + (grid.n,) * grid.dim
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def _zero_mean(field: SpectralField) -> SpectralField:
    field.coef[(slice(None),) + (0,) * field.grid.dim] = 0.0
    return field


def _clean(field: SpectralField) -> SpectralField:
    return symmetrize_real(_zero_mean(field))


def _annulus_mask(grid: GridSpec, j: int, band: int) -> np.ndarray:
    r = _k_radii(grid) * grid.freq_step
    lo, hi = PSI_SUPPORT[0] * 2.0 ** j, PSI_SUPPORT[1] * 2.0 ** j
    return (r >= lo) & (r <= hi) & (_k_radii(grid) <= band)


def flat_binf_field(grid: GridSpec, seed, band: int | None = None) -> SpectralField:
    band = default_band(grid) if band is None else band
    rng = _rng(*np.atleast_1d(seed))
    total = zero_field(grid, "scalar")
    for j in range(bottom_block_index(grid), top_block_index(grid, band) + 1):
        mask = _annulus_mask(grid, j, band)
        coef = _random_coef(rng, grid, 1) * mask[None]
        block = _clean(SpectralField(grid, coef, "scalar"))
        sup = lp_norm(block, np.inf)
        if sup > 0:
            total = total + (1.0 / sup) * block
    return total


def white_l2_field(grid: GridSpec, seed, band: int | None = None) -> SpectralField:
    band = default_band(grid) if band is None else band
    rng = _rng(*np.atleast_1d(seed))
    mask = (_k_radii(grid) <= band)
    coef = _random_coef(rng, grid, 1) * mask[None]
    f = _clean(SpectralField(grid, coef, "scalar"))
    n2 = lp_norm(f, 2)
    return (1.0 / n2) * f if n2 > 0 else f


def divfree_vector_field(grid: GridSpec, seed, band: int | None = None,
                         spectrum: str = "dyadic", slope: float = 1.0,
                         sigma2: float = 8.0) -> SpectralField:
    band = default_band(grid) if band is None else band
    rng = _rng(*np.atleast_1d(seed))
    if spectrum in ("smooth", "white"):
        radii = _k_radii(grid) * grid.freq_step
        decay = (np.exp(-radii ** 2 / (2.0 * sigma2)) if spectrum == "smooth"
                 else np.ones_like(radii)) * (_k_radii(grid) <= band)
        coef = _random_coef(rng, grid, grid.dim) * decay[None]
        f = symmetrize_real(leray_project(_zero_mean(SpectralField(grid, coef, "vector"))))
        n2 = lp_norm(f, 2)
        return (1.0 / n2) * f if n2 > 0 else f
    if spectrum != "dyadic":
        raise ValueError(f"unknown vector spectrum {spectrum!r}")
    total = zero_field(grid, "vector")
    for j in range(bottom_block_index(grid), top_block_index(grid, band) + 1):
        mask = _annulus_mask(grid, j, band)
        coef = _random_coef(rng, grid, grid.dim) * mask[None]
        block = symmetrize_real(leray_project(_zero_mean(SpectralField(grid, coef, "vector"))))
        sup = lp_norm(block, np.inf)
        if sup > 0:
            total = total + (2.0 ** (slope * j) / sup) * block
    return total


_BUILDERS = {
    "flat_binf": flat_binf_field,
    "white_l2": white_l2_field,
    "divfree_vector": divfree_vector_field,
}


def ensemble(seed: int, size: int, profile: str, grid: GridSpec,
             **options) -> list[SpectralField]:
    """``size`` deterministic fields of the given profile."""
    if size < 1:
        raise ValueError("ensemble size must be at least 1")
    if profile not in _BUILDERS:
        raise ValueError(f"unknown profile {profile!r} (have {PROFILES})")
    build = _BUILDERS[profile]
    return [build(grid, (seed, i), **options) for i in range(size)]


def pair_ensemble(seed: int, size: int, profile_f: str, profile_g: str,
                  grid: GridSpec, options_f: dict | None = None,
                  options_g: dict | None = None) -> list[tuple]:
    """Deterministic (f, g) pairs with independent sub-seeds per slot."""
    bf, bg = _BUILDERS[profile_f], _BUILDERS[profile_g]
    return [(bf(grid, (seed, i, 0), **(options_f or {})),
             bg(grid, (seed, i, 1), **(options_g or {})))
            for i in range(size)]
