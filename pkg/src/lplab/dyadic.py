"""Dyadic partition of unity and Littlewood-Paley projectors.

The radial profile is built in two steps.  First

    theta(r) = up_step(r, 3/4, 1) * down_step(r, 2, 8/3)

is a smooth bump, equal to 1 on [1, 2] and supported exactly in
[3/4, 8/3].  Second, the profile is normalized across dyadic dilates,

    psi(r) = theta(r) / sum_j theta(r / 2^j),

which makes sum_j psi(r / 2^j) = 1 for every r > 0 an algebraic identity
(the denominator is the same for every term of the sum), not merely an
approximation.  At most two consecutive j contribute at any r.

Block projectors multiply Fourier coefficients by psi(|xi| / 2^j); their
output is exactly zero outside the annulus |xi| in 2^j [3/4, 8/3].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import profiles
from .grid import GridSpec, SpectralField

PSI_SUPPORT = (0.75, 8.0 / 3.0)


def theta(r):
    """Smooth bump: 1 on [1, 2], supported exactly in [3/4, 8/3]."""
    r = np.asarray(r, dtype=float)
    return profiles.up_step(r, 0.75, 1.0) * profiles.down_step(r, 2.0, 8.0 / 3.0)


def theta_jet(r):
    return profiles.jet_mul(profiles.up_step_jet(r, 0.75, 1.0),
                            profiles.down_step_jet(r, 2.0, 8.0 / 3.0))


def psi(r):
    """Dyadic profile: theta normalized so the dilates sum to 1 for r > 0."""
    r = np.asarray(r, dtype=float)
    num = theta(r)
    # only the dilates at j in {-1, 0, 1} can overlap supp theta
    den = theta(0.5 * r) + num + theta(2.0 * r)
    out = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return out if out.shape else float(out)


def psi_jet(r):
    """Value and four derivatives of psi (analytic, via Taylor jets)."""
    r = np.asarray(r, dtype=float)
    num = theta_jet(r)
    den = (profiles.jet_affine(theta_jet(0.5 * r), 0.5)
           + num
           + profiles.jet_affine(theta_jet(2.0 * r), 2.0))
    jet = profiles.jet_div(num, den)
    dead = den[0] <= 0
    jet[:, dead] = 0.0
    return jet


@dataclass(frozen=True)
class DyadicBank:
    """The profile psi plus the dyadic index range covered by a grid."""
    j_min: int
    j_max: int

    def __post_init__(self):
        if self.j_min > self.j_max:
            raise ValueError("j_min must not exceed j_max")

    def js(self):
        return range(self.j_min, self.j_max + 1)

    psi = staticmethod(psi)
    psi_jet = staticmethod(psi_jet)


def build_psi() -> DyadicBank:
    """The canonical profile with a generous default index range."""
    return DyadicBank(-8, 12)


def bank_for_grid(grid: GridSpec) -> DyadicBank:
    """Index range covering every nonzero lattice frequency of the grid.

    j_min sits two octaves under the smallest nonzero |xi| = 2 pi / period
    and j_max one octave over the lattice corner sqrt(dim) * nyquist, so
    the truncated sum of blocks reproduces every covered mode exactly.
    """
    r_lo = grid.freq_step
    r_hi = np.sqrt(grid.dim) * grid.nyquist
    j_min = int(np.floor(np.log2(r_lo))) - 2
    j_max = int(np.ceil(np.log2(r_hi))) + 1
    return DyadicBank(j_min, j_max)


def block_annulus(j: int):
    return (PSI_SUPPORT[0] * 2.0 ** j, PSI_SUPPORT[1] * 2.0 ** j)


def dyadic_block(f: SpectralField, j: int) -> SpectralField:
    """Delta_j f: coefficients weighted by psi(|xi| / 2^j)."""
    radii = f.grid.freq_radii()
    weight = psi(radii / 2.0 ** j)
    return SpectralField(f.grid, f.coef * weight[None], f.tag)


def dyadic_range(f: SpectralField, lo, hi, bank: DyadicBank | None = None) -> SpectralField:
    """sum_{j=lo..hi} Delta_j f, with lo = -inf / hi = +inf allowed.

    Infinite endpoints are clipped to the finite window outside which no
    dilate of psi meets the grid's frequency lattice, so e.g. Delta_{<=N}
    acts as the identity on every covered mode below scale N.
    """
    if bank is None:
        bank = bank_for_grid(f.grid)
    lo_eff = bank.j_min if np.isneginf(lo) else int(lo)
    hi_eff = bank.j_max if np.isposinf(hi) else int(hi)
    if lo_eff > hi_eff:
        raise ValueError(f"empty dyadic range [{lo}, {hi}]")
    lo_eff = max(lo_eff, bank.j_min)
    hi_eff = min(hi_eff, bank.j_max)
    radii = f.grid.freq_radii()
    weight = np.zeros_like(radii)
    for j in range(lo_eff, hi_eff + 1):
        weight += psi(radii / 2.0 ** j)
    return SpectralField(f.grid, f.coef * weight[None], f.tag)
