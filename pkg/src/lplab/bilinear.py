"""Bilinear pseudo-products, kernel criterion, and symbol-condition estimator.

A symbol m(xi, eta) acts on a pair of fields through

    (B_m(f,g))^(xi) = int m(xi,eta) fhat(eta) ghat(xi-eta) deta ,

discretized as the lattice sum

    c_out(xi) = (2 pi)^{d/2} sum_eta m(xi,eta) c_f(eta) c_g(xi-eta),

whose constant matches the unitary continuum convention (m == 1 gives
(2 pi)^{d/2} times the pointwise product).  Inputs must be band-limited to
half Nyquist so that the convolution cannot alias.

The kernel route inverts m over the doubled lattice,

    M(p, q) = (2 pi)^{-3d/2} int m(xi,eta) e^{i(p.xi + q.eta)} dxi deta,
    B_m(f,g)(x) = int M(x-z, z-y) f(y) g(z) dy dz,

so that ||B_m(f,g)||_inf <= ||M||_{L^1} ||f||_inf ||g||_inf (Young); the
L^1 mass of M is the boundedness certificate checked by the experiments.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from .grid import (GridSpec, SpectralField, from_physical,
                   require_half_nyquist, to_physical)

KERNEL_GRID_CAP = 2 ** 24  # max entries of the doubled (xi, eta) lattice


@dataclass
class Symbol:
    """An evaluatable bilinear multiplier with metadata.

    ``eval(xi, eta)`` takes arrays of shape (..., d) (numpy broadcasting)
    and returns complex values of shape (...) for scalar symbols, or
    (..., d, d) for matrix symbols.  Matrix symbols contract a scalar
    first argument with a vector second argument:
    out_i = sum_j M_ij fhat ghat_j.
    """
    name: str
    eval: callable
    value_kind: str = "scalar"
    params: dict = dc_field(default_factory=dict)
    fast_apply: callable | None = None

    def __call__(self, xi, eta):
        return self.eval(np.asarray(xi, dtype=float), np.asarray(eta, dtype=float))

    def apply(self, f: SpectralField, g: SpectralField) -> SpectralField:
        """Apply B_m, preferring a dedicated fast path when one is attached."""
        if self.fast_apply is not None:
            return self.fast_apply(f, g)
        return apply_symbol(self, f, g)


def add_symbols(name: str, *symbols: Symbol) -> Symbol:
    kinds = {s.value_kind for s in symbols}
    if len(kinds) != 1:
        raise ValueError("cannot add symbols of mixed value kinds")
    def _eval(xi, eta):
        return sum(s.eval(xi, eta) for s in symbols)
    return Symbol(name, _eval, value_kind=kinds.pop())


@dataclass
class KernelEstimate:
    """Physical-space kernel of a symbol with its L^1 mass."""
    grid: GridSpec
    kernel: np.ndarray  # shape (n,)*2d, axes (p, q) in FFT spatial order
    l1_norm: float
    boundary_fraction: float


def _nonzero_modes(f: SpectralField):
    """Signed integer lattice vectors and coefficients of the nonzero modes."""
    mask = np.any(np.abs(f.coef) > 0, axis=0)
    idx = np.argwhere(mask)
    n = f.grid.n
    signed = np.where(idx >= n // 2, idx - n, idx)
    coefs = f.coef[(slice(None),) + tuple(idx.T)]
    return idx, signed, coefs.T  # coefs: (nmodes, ncomp)


def _xi_stack(grid: GridSpec) -> np.ndarray:
    comps = grid.freq_components()
    return np.stack(comps, axis=-1)


def apply_symbol(m: Symbol, f: SpectralField, g: SpectralField) -> SpectralField:
    """Direct lattice convolution weighted by the symbol.

    Scalar symbols act componentwise on matching tags; matrix symbols
    take (scalar f, vector g) to a vector field.  Loops over the nonzero
    modes of f with full-lattice vectorization over the output frequency.
    """
    if f.grid != g.grid:
        raise ValueError("fields must share a grid")
    require_half_nyquist(f, g)
    grid = f.grid
    xi = _xi_stack(grid)
    idx, signed, coefs = _nonzero_modes(f)
    axes = tuple(range(grid.dim))

    if m.value_kind == "scalar":
        if f.tag != g.tag:
            raise ValueError("scalar symbols act componentwise on matching tags")
        out = np.zeros_like(g.coef)
        for row, kvec, cf in zip(idx, signed, coefs):
            eta = grid.freq_step * kvec.astype(float)
            mv = m.eval(xi, eta)
            shifted = np.roll(g.coef, shift=tuple(row), axis=tuple(a + 1 for a in axes))
            out += mv[None] * shifted * cf[:, None, None] if grid.dim == 2 \
                else mv[None] * shifted * cf[:, None, None, None]
        out *= (2.0 * np.pi) ** (grid.dim / 2.0)
        return SpectralField(grid, out, g.tag)

    if m.value_kind == "matrix":
        if f.tag != "scalar" or g.tag != "vector":
            raise ValueError("matrix symbols contract (scalar f, vector g)")
        out = np.zeros((grid.dim,) + (grid.n,) * grid.dim, dtype=complex)
        for row, kvec, cf in zip(idx, signed, coefs):
            eta = grid.freq_step * kvec.astype(float)
            mv = m.eval(xi, eta)  # (..., d, d)
            shifted = np.roll(g.coef, shift=tuple(row), axis=tuple(a + 1 for a in axes))
            contracted = np.einsum("...ij,j...->i...", mv, shifted)
            out += contracted * cf[0]
        out *= (2.0 * np.pi) ** (grid.dim / 2.0)
        return SpectralField(grid, out, "vector")

    raise ValueError(f"unknown value_kind {m.value_kind!r}")


def kernel_of_symbol(m: Symbol, grid: GridSpec) -> KernelEstimate:
    """Inverse transform of the symbol over the doubled (xi, eta) lattice.

    Warns when more than 1% of the kernel's L^1 mass sits in the outer
    half of the periodic box (undersampling / non-integrable tail).
    """
    if m.value_kind != "scalar":
        raise ValueError("kernel estimation is defined for scalar symbols")
    d, n = grid.dim, grid.n
    if n ** (2 * d) > KERNEL_GRID_CAP:
        raise ValueError(f"doubled lattice {n}^{2 * d} exceeds the kernel-grid cap")
    comps = grid.freq_components()
    shape = (n,) * d
    xi = np.stack([c.reshape(shape + (1,) * d) * np.ones((1,) * d + shape)
                   for c in comps], axis=-1)
    eta = np.stack([c.reshape((1,) * d + shape) * np.ones(shape + (1,) * d)
                    for c in comps], axis=-1)
    values = m.eval(xi, eta)
    const = ((2.0 * np.pi) ** (-1.5 * d) * grid.freq_step ** (2 * d) * n ** (2 * d))
    kernel = np.fft.ifftn(values) * const
    absk = np.abs(kernel)
    cell = (grid.period / n) ** (2 * d)
    l1 = float(absk.sum() * cell)
    # outer quarter of the box: periodic Chebyshev distance beyond 3/8 period
    ax = np.minimum(np.arange(n), n - np.arange(n)) * (grid.period / n)
    cheb = np.zeros((n,) * (2 * d))
    for a in range(2 * d):
        view = ax.reshape((1,) * a + (n,) + (1,) * (2 * d - a - 1))
        cheb = np.maximum(cheb, view)
    outer = cheb > 0.375 * grid.period
    frac = float(absk[outer].sum() / absk.sum()) if absk.sum() > 0 else 0.0
    if frac > 0.01:
        warnings.warn(f"kernel_of_symbol[{m.name}]: {100 * frac:.2f}% of the kernel mass "
                      "sits near the domain boundary")
    return KernelEstimate(grid=grid, kernel=kernel, l1_norm=l1, boundary_fraction=frac)


def apply_via_kernel(k: KernelEstimate, f: SpectralField, g: SpectralField) -> SpectralField:
    """Direct double Riemann sum  B(x) = sum_{y,z} M(x-z, z-y) f(y) g(z) h^{2d}.

    Quadratic in the grid volume; intended as the independent oracle for
    apply_symbol on small grids.
    """
    grid = k.grid
    if f.grid != grid or g.grid != grid:
        raise ValueError("fields must live on the kernel's grid")
    if f.tag != "scalar" or g.tag != "scalar":
        raise ValueError("kernel route implemented for scalar fields")
    d, n = grid.dim, grid.n
    V = n ** d
    M2 = k.kernel.reshape(V, V)
    fp = to_physical(f)[0].ravel()
    gp = to_physical(g)[0].ravel()
    coords = np.indices((n,) * d).reshape(d, V)
    out = np.zeros(V, dtype=complex)
    h2d = (grid.period / n) ** (2 * d)
    for zi in range(V):
        z = coords[:, zi]
        q_idx = (z[:, None] - coords) % n  # z - y per axis
        qflat = np.ravel_multi_index(tuple(q_idx), (n,) * d)
        S = M2[:, qflat] @ fp  # S(p) = sum_y M(p, z-y) f(y)
        x_idx = (z[:, None] + coords) % n  # x = p + z
        xflat = np.ravel_multi_index(tuple(x_idx), (n,) * d)
        out[xflat] += gp[zi] * S
    out *= h2d
    return from_physical(grid, out.reshape((n,) * d), tag="scalar")


@dataclass
class CmConditionReport:
    """Result of the symbol-condition sweep."""
    value: float
    worst_sample: tuple | None
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures and np.isfinite(self.value)


def _central_diff_1d(values_fn, point, var, order, h):
    """n-th central difference in one variable of the flattened (xi,eta) point."""
    ks = np.arange(order + 1)
    coeffs = (-1.0) ** ks * np.array([math.comb(order, k) for k in ks])
    offsets = order / 2.0 - ks
    total = 0.0
    for c, o in zip(coeffs, offsets):
        shifted = point.copy()
        shifted[var] += o * h
        total = total + c * values_fn(shifted)
    return total / h ** order


def cm_condition_estimate(m: Symbol, max_order: int, samples) -> CmConditionReport:
    """sup over samples and |alpha|+|beta| <= max_order of
    |d^alpha_xi d^beta_eta m| * (|xi|+|eta|)^{|alpha|+|beta|}.

    Derivatives by iterated central differences with per-variable step
    h = 1e-4 (|xi|+|eta|).  Non-finite derivatives are collected as
    failures rather than raised.
    """
    if max_order > 4:
        raise ValueError("max_order above 4 is not supported")
    d = None
    best = 0.0
    worst = None
    failures = []
    for xi0, eta0 in samples:
        xi0 = np.asarray(xi0, dtype=float)
        eta0 = np.asarray(eta0, dtype=float)
        d = xi0.size
        scale = np.linalg.norm(xi0) + np.linalg.norm(eta0)
        if scale == 0:
            raise ValueError("samples must avoid (0, 0)")
        h = 1e-4 * scale
        z0 = np.concatenate([xi0, eta0])

        def point_eval(z):
            return complex(m.eval(z[:d], z[d:]))

        for total_order in range(max_order + 1):
            for orders in itertools.product(range(total_order + 1), repeat=2 * d):
                if sum(orders) != total_order:
                    continue
                val = _evaluate_mixed_derivative(point_eval, z0, orders, h)
                weighted = abs(val) * scale ** total_order
                if not np.isfinite(weighted):
                    failures.append((tuple(xi0), tuple(eta0), orders))
                    continue
                if weighted > best:
                    best = weighted
                    worst = (tuple(xi0), tuple(eta0), orders)
    return CmConditionReport(value=best, worst_sample=worst, failures=failures)


def _evaluate_mixed_derivative(point_eval, z0, orders, h):
    """Tensor-product central differences for a mixed partial derivative."""
    stencils = []
    for var, order in enumerate(orders):
        if order == 0:
            continue
        ks = np.arange(order + 1)
        coeffs = (-1.0) ** ks * np.array([math.comb(order, k) for k in ks])
        offsets = order / 2.0 - ks
        stencils.append((var, coeffs, offsets, order))
    total = 0.0
    combos = itertools.product(*[range(len(s[1])) for s in stencils]) if stencils else [()]
    for combo in combos:
        z = z0.astype(float).copy()
        weight = 1.0
        for (var, coeffs, offsets, _), pick in zip(stencils, combo):
            z[var] += offsets[pick] * h
            weight *= coeffs[pick]
        total = total + weight * point_eval(z)
    return total / h ** sum(orders)


def log_sample_cloud(dim: int, count: int = 128, seed: int = 7,
                     r_min: float = 0.1, r_max: float = 100.0):
    """Deterministic log-radial sample cloud in (xi, eta)-space avoiding (0,0)."""
    rng = np.random.default_rng(seed)
    radii = np.geomspace(r_min, r_max, count)
    out = []
    for r in radii:
        v = rng.normal(size=2 * dim)
        v *= r / np.linalg.norm(v)
        out.append((v[:dim].copy(), v[dim:].copy()))
    return out


def boundedness_ratio(m: Symbol, in1_norm, in2_norm, out_norm, pairs,
                      meta: dict | None = None) -> dict:
    """Empirical operator-norm ratios over an ensemble of field pairs.

    Returns rows (pair, ratio and the three norms) plus max/median; pairs
    with a vanishing input norm are skipped.  Norms may be selector names
    (see spaces.norm_selector) or callables.
    """
    from .spaces import norm_selector
    sel = [n if callable(n) else norm_selector(n) for n in (in1_norm, in2_norm, out_norm)]
    rows = []
    for i, (f, g) in enumerate(pairs):
        nf, ng = sel[0](f), sel[1](g)
        if nf == 0 or ng == 0:
            continue
        nout = sel[2](m.apply(f, g))
        rows.append({"pair": i, "ratio": nout / (nf * ng),
                     "in1": nf, "in2": ng, "out": nout})
    ratios = np.array([r["ratio"] for r in rows])
    summary = {
        "symbol": m.name,
        "max_ratio": float(ratios.max()) if ratios.size else 0.0,
        "median_ratio": float(np.median(ratios)) if ratios.size else 0.0,
        "pairs": len(rows),
    }
    if meta:
        summary.update(meta)
    return {"rows": rows, "summary": summary}
