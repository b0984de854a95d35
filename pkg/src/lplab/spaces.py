"""Discrete Besov norms and their heat / Carleson characterizations.

Besov norms aggregate the block norms 2^{js} ||Delta_j f||_p in l^q over
the dyadic range covered by the grid.  The heat characterizations

    ||f||  ~ ( int_0^inf ||e^{t Lap} f||_inf^2 dt )^{1/2}        (s=-1, q=2)
    ||f||  ~ sup_t sqrt(t) ||e^{t Lap} f||_inf                   (s=-1, q=inf)

and the Carleson-type averages for BMO / grad-BMO are implemented as
measured quantities: every equivalence here is "up to constants", so the
experiments report two-sided ratio constants rather than asserting
equalities.

Discrete Carleson averages use the mean over lattice points of the ball
(rather than dividing by the continuum R^d), a bounded change of
normalization that keeps single-block values O(1).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dyadic import DyadicBank, bank_for_grid, dyadic_block
from .grid import GridSpec, SpectralField, heat_propagate, lp_norm, to_physical


@dataclass(frozen=True)
class BesovParams:
    """Regularity s, integrability p, summability q, optional dyadic window."""
    s: float
    p: float
    q: float
    j_range: tuple[int, int] | None = None

    def __post_init__(self):
        if not (self.p >= 1 and self.q >= 1):
            raise ValueError("p and q must lie in [1, inf]")
        if self.j_range is not None and self.j_range[0] > self.j_range[1]:
            raise ValueError("j_range must be ordered")


@dataclass
class NormReport:
    """A norm value with its per-block breakdown and truncation diagnostic."""
    value: float
    per_block: list  # (j, 2^{js} ||Delta_j f||_p)
    truncation_tail: float

    def recompute(self, q: float) -> float:
        terms = np.array([t for _, t in self.per_block])
        return _lq_aggregate(terms, q)

    def to_dict(self) -> dict:
        return {"value": self.value,
                "per_block": [[int(j), float(t)] for j, t in self.per_block],
                "truncation_tail": self.truncation_tail}


def _lq_aggregate(terms: np.ndarray, q: float) -> float:
    if terms.size == 0:
        return 0.0
    if np.isinf(q):
        return float(np.max(terms))
    return float(np.sum(terms ** q) ** (1.0 / q))


def besov_norm(f: SpectralField, params: BesovParams,
               bank: DyadicBank | None = None) -> NormReport:
    """l^q-over-j aggregation of 2^{js} ||Delta_j f||_{L^p}.

    The truncation tail reports the L^p mass of f minus the sum of covered
    blocks (on a full dyadic window this is the DC mode only).
    """
    if bank is None:
        bank = bank_for_grid(f.grid)
    lo, hi = params.j_range if params.j_range is not None else (bank.j_min, bank.j_max)
    per_block = []
    covered = np.zeros_like(f.coef)
    for j in range(lo, hi + 1):
        block = dyadic_block(f, j)
        if not np.any(block.coef):
            per_block.append((j, 0.0))
            continue
        covered += block.coef
        per_block.append((j, 2.0 ** (j * params.s) * lp_norm(block, params.p)))
    residual = SpectralField(f.grid, f.coef - covered, f.tag)
    tail = lp_norm(residual, params.p)
    value = _lq_aggregate(np.array([t for _, t in per_block]), params.q)
    return NormReport(value=value, per_block=per_block, truncation_tail=tail)


def default_heat_grid(grid: GridSpec, points: int = 64,
                      bank: DyadicBank | None = None) -> np.ndarray:
    """Log-spaced t covering the dyadic content with two guard octaves."""
    if bank is None:
        bank = bank_for_grid(grid)
    t_min = 2.0 ** (-2 * (bank.j_max + 1))
    t_max = 2.0 ** (-2 * (bank.j_min - 1))
    return np.geomspace(t_min, t_max, points)


def _sup_norm_series(f: SpectralField, t_grid: np.ndarray) -> np.ndarray:
    return np.array([lp_norm(heat_propagate(f, t), np.inf) for t in t_grid])


def heat_b_minus1_inf2(f: SpectralField, t_quadrature: np.ndarray | None = None) -> float:
    """sqrt of the log-trapezoid quadrature of ||e^{t Lap} f||_inf^2 over t.

    Warns when either boundary panel carries more than 1% of the integral
    (content leaking out of the covered t window).
    """
    if t_quadrature is None:
        t_quadrature = default_heat_grid(f.grid)
    t = np.asarray(t_quadrature, dtype=float)
    vals = _sup_norm_series(f, t) ** 2
    # substitute t = e^tau: integral of vals * t dtau
    tau = np.log(t)
    integrand = vals * t
    panels = 0.5 * (integrand[1:] + integrand[:-1]) * np.diff(tau)
    total = float(np.sum(panels))
    if total > 0 and (panels[0] > 0.01 * total or panels[-1] > 0.01 * total):
        warnings.warn("heat_b_minus1_inf2: boundary panel exceeds 1% of the integral")
    return float(np.sqrt(total))


def b_minus1_inf_inf_heat(f: SpectralField, t_grid: np.ndarray | None = None) -> float:
    """max over the log t-grid of sqrt(t) ||e^{t Lap} f||_inf."""
    if t_grid is None:
        t_grid = default_heat_grid(f.grid)
    t = np.asarray(t_grid, dtype=float)
    return float(np.max(np.sqrt(t) * _sup_norm_series(f, t)))


def default_centers(grid: GridSpec, per_axis: int = 4) -> np.ndarray:
    """Coarse lattice of sample centers (grid-point indices)."""
    step = grid.n // per_axis
    axes = [np.arange(0, grid.n, step)] * grid.dim
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def default_radii(grid: GridSpec) -> np.ndarray:
    """Dyadic radii inside (grid cell, period / 4]."""
    cell = grid.period / grid.n
    radii = []
    r = grid.period / 4.0
    while r > cell:
        radii.append(r)
        r /= 2.0
    return np.array(radii)


def _ball_offsets(grid: GridSpec, radius: float) -> tuple:
    """Index offsets of lattice points within periodic distance ``radius`` of 0."""
    h = grid.period / grid.n
    reach = int(np.floor(radius / h))
    ax = np.arange(-reach, reach + 1)
    mesh = np.meshgrid(*([ax] * grid.dim), indexing="ij")
    dist_sq = sum((m * h) ** 2 for m in mesh)
    keep = dist_sq <= radius ** 2
    return tuple(m[keep] for m in mesh)


def _ball_means(phys_sq: np.ndarray, grid: GridSpec, centers: np.ndarray,
                offsets: tuple) -> np.ndarray:
    """Mean of phys_sq over the periodic ball at each center."""
    n = grid.n
    means = np.empty(len(centers))
    for i, c in enumerate(centers):
        idx = tuple((c[a] + offsets[a]) % n for a in range(grid.dim))
        means[i] = phys_sq[idx].mean()
    return means


def grad_bmo_carleson(f: SpectralField, sample_centers: np.ndarray | None = None,
                      radii: np.ndarray | None = None) -> float:
    """Discrete grad-BMO Carleson norm.

    sqrt of the max over sampled (x, R) of the ball-mean space-time average

        mean_{B(x,R)} int_0^{R^2} |e^{t Lap} f|^2 dt,

    the t-integral by log-trapezoid quadrature plus an exact small-t head
    where the heat flow is inert on the band-limited field.
    """
    if sample_centers is None:
        sample_centers = default_centers(f.grid)
    if radii is None:
        radii = default_radii(f.grid)
    bank = bank_for_grid(f.grid)
    t_head = 2.0 ** (-2 * (bank.j_max + 1))
    best = 0.0
    phys0 = np.sum(np.abs(to_physical(f)) ** 2, axis=0)
    for R in radii:
        offsets = _ball_offsets(f.grid, R)
        t_lo = min(t_head, R ** 2 / 4.0)
        t_grid = np.geomspace(t_lo, R ** 2, 24)
        tau = np.log(t_grid)
        sq = [np.sum(np.abs(to_physical(heat_propagate(f, t))) ** 2, axis=0)
              for t in t_grid]
        # accumulate the time integral pointwise in space
        acc = np.zeros_like(sq[0])
        for i in range(len(t_grid) - 1):
            acc += 0.5 * (sq[i] * t_grid[i] + sq[i + 1] * t_grid[i + 1]) * (tau[i + 1] - tau[i])
        acc += t_lo * phys0  # [0, t_lo] head: e^{t Lap} f  ~  f there
        means = _ball_means(acc, f.grid, sample_centers, offsets)
        best = max(best, float(means.max()))
    return float(np.sqrt(best))


def bmo_carleson_norm(f: SpectralField, sample_centers: np.ndarray | None = None,
                      J_range: tuple[int, int] | None = None) -> float:
    """Discrete BMO norm via block-square Carleson averages.

    sqrt of the max over sampled (J, x) of mean_{B(x, 2^J)} of
    sum_{j >= -J} |Delta_j f|^2, with 2^J restricted to (cell, period/4).
    """
    if sample_centers is None:
        sample_centers = default_centers(f.grid)
    grid = f.grid
    bank = bank_for_grid(grid)
    if J_range is None:
        cell = grid.period / grid.n
        J_lo = int(np.ceil(np.log2(cell))) + 1
        J_hi = int(np.floor(np.log2(grid.period / 4.0)))
        J_range = (J_lo, J_hi)
    block_sq = {}
    for j in bank.js():
        b = dyadic_block(f, j)
        if np.any(b.coef):
            block_sq[j] = np.sum(np.abs(to_physical(b)) ** 2, axis=0)
    best = 0.0
    for J in range(J_range[0], J_range[1] + 1):
        live = [sq for j, sq in block_sq.items() if j >= -J]
        if not live:
            continue
        G = np.sum(live, axis=0)
        offsets = _ball_offsets(grid, 2.0 ** J)
        means = _ball_means(G, grid, sample_centers, offsets)
        best = max(best, float(means.max()))
    return float(np.sqrt(best))


def chemin_decay_check(f: SpectralField, j: int, t: float) -> float:
    """||e^{t Lap} Delta_j f||_inf / ||Delta_j f||_inf."""
    block = dyadic_block(f, j)
    denom = lp_norm(block, np.inf)
    if denom == 0:
        raise ValueError(f"Delta_{j} f vanishes; decay ratio undefined")
    return lp_norm(heat_propagate(block, t), np.inf) / denom


def norm_selector(name: str):
    """Map a norm name to a callable SpectralField -> float.

    Recognized: "l2", "linf", "besov:s,p,q" (p, q may be "inf"),
    "bmo", "gradbmo", "b-1inf2heat", "b-1infinfheat".
    """
    key = name.lower().replace(" ", "")
    if key == "l2":
        return lambda f: lp_norm(f, 2)
    if key == "linf":
        return lambda f: lp_norm(f, np.inf)
    if key == "bmo":
        return bmo_carleson_norm
    if key == "gradbmo":
        return grad_bmo_carleson
    if key == "b-1inf2heat":
        return heat_b_minus1_inf2
    if key == "b-1infinfheat":
        return b_minus1_inf_inf_heat
    if key.startswith("besov:"):
        parts = key.split(":", 1)[1].split(",")
        s = float(parts[0])
        p = np.inf if parts[1] == "inf" else float(parts[1])
        q = np.inf if parts[2] == "inf" else float(parts[2])
        return lambda f: besov_norm(f, BesovParams(s, p, q)).value
    raise ValueError(f"unknown norm selector {name!r}")


def embedding_chain_constants(fields) -> dict:
    """Measured constants of the chain  B^{-1}_{inf,inf} <= C gradBMO <= C' B^{-1}_{inf,2}.

    Returns per-field rows and the ensemble-max constants; heat
    characterizations are used on the outer norms so all three quantities
    share the heat-extension route.
    """
    rows = []
    for i, f in enumerate(fields):
        lo = b_minus1_inf_inf_heat(f)
        mid = grad_bmo_carleson(f)
        hi = heat_b_minus1_inf2(f)
        rows.append({"field": i, "binf_inf": lo, "grad_bmo": mid, "binf_2": hi,
                     "c_low": lo / mid if mid > 0 else np.nan,
                     "c_high": mid / hi if hi > 0 else np.nan})
    c_low = max(r["c_low"] for r in rows)
    c_high = max(r["c_high"] for r in rows)
    return {"rows": rows, "C": c_low, "C_prime": c_high}
