"""Second-iterate bilinear operators, region cutoffs, and the symbol catalog.

The model operators at time 1 act on divergence-free fields through

    (T1(f,g))^(xi) = P(xi) e^{-|xi|^2}
                     sum_eta TF(a) [fhat(eta) . (xi-eta)] ghat(xi-eta),
    T2(f,g) = T1(f,g) + T1(g,f),

with a = |xi|^2 - |eta|^2 - |xi-eta|^2 and TF(a) = int_0^1 e^{sa} ds.
T1/T2 and the Picard iterates use the plain torus-convolution
normalization (no unitary constant); the scalar symbol catalog below is
meant for the pseudo-product machinery, which carries the continuum
(2 pi)^{d/2} factor.

The scalar catalog implements the reduced symbols

    mu  = e^{-|xi|^2} l1(eta) l2(xi)      TF(a)         and its cutoffs,
    nu  = e^{-|xi|^2} l1(eta) l2(xi-eta)  TF(a)         and its cutoffs,

their integrated-in-time splits (prime / double-prime variants over the
high-high region), and the dyadic pieces N, N_j.  Everywhere the damped
combination e^{-|xi|^2} TF(a) = (e^{-|eta|^2-|xi-eta|^2} - e^{-|xi|^2})/a
is evaluated in that subtracted form, which never overflows.

Frequency regions: chi1 covers |xi|+|eta| <= 2, chi2 the comparable-
frequency region, chi3 the high-high-to-low region |xi| <= |eta|/5; they
are built from smoothsteps so chi1+chi2+chi3 = 1 holds identically and
chi2, chi3 are exactly homogeneous of degree zero for |xi|+|eta| >= 3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .bilinear import Symbol
from .dyadic import dyadic_block
from .grid import (SpectralField, divergence_ratio, heat_propagate,
                   leray_project, lp_norm, require_half_nyquist, zero_field)
from .profiles import down_step

DENOM_CLAMP = 1e-8  # defensive floor for the chi3-region denominators
_TF_TAYLOR = 1e-4


# ---------------------------------------------------------------------------
# time factor
# ---------------------------------------------------------------------------

def duhamel_time_factor(a):
    """int_0^1 e^{sa} ds = (e^a - 1)/a, with a Taylor branch for |a| < 1e-4."""
    a = np.asarray(a, dtype=float)
    small = np.abs(a) < _TF_TAYLOR
    safe = np.where(small, 1.0, a)
    out = np.where(small,
                   1.0 + a * (0.5 + a * (1.0 / 6.0 + a / 24.0)),
                   np.expm1(safe) / safe)
    return out if out.shape else float(out)


@dataclass(frozen=True)
class TimeFactor:
    """The exponent a = |xi|^2 - |eta|^2 - |xi-eta|^2 with its time integral."""
    a: float
    value: float

    @classmethod
    def from_exponent(cls, a: float) -> "TimeFactor":
        return cls(a=a, value=float(duhamel_time_factor(a)))


# ---------------------------------------------------------------------------
# region partition
# ---------------------------------------------------------------------------

# chi1 falls in the smoothed joint l1-radius
#     sigma = sqrt(|xi|^2 + d^2) + sqrt(|eta|^2 + d^2) - 2 d,
# which is C-infinity across the coordinate axes (|xi| + |eta| itself has
# corners there that would spoil the decay of every kernel built on the
# cutoffs) and satisfies  |xi| + |eta| - 2d <= sigma <= |xi| + |eta|.  The
# transition window [1, 2 - 2d] therefore keeps supp chi1 inside
# {|xi| + |eta| <= 2} with chi1 = 1 wherever |xi| + |eta| <= 1, and it is
# as wide as the smoothing allows (narrow windows cost dearly in kernel
# decay, see kernel_of_symbol).
CHI_SMOOTHING = 0.2
RADIAL_CUT = (1.0, 2.0 - 2.0 * CHI_SMOOTHING)
RATIO_CUT = (1.0 / 6.0, 1.0 / 5.0)  # chi3 transition in |xi| / |eta|


def chi_partition(xi, eta):
    """(chi1, chi2, chi3) at (xi, eta); accepts (..., d) arrays."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    xin = np.sqrt(np.sum(xi * xi, axis=-1))
    en = np.sqrt(np.sum(eta * eta, axis=-1))
    return _chi_radial(xin, en)


def _chi_radial(xin, en):
    d = CHI_SMOOTHING
    sigma = (np.sqrt(np.asarray(xin) ** 2 + d * d)
             + np.sqrt(np.asarray(en) ** 2 + d * d) - 2.0 * d)
    chi1 = down_step(sigma, *RADIAL_CUT)
    ratio = np.divide(xin, en, out=np.full_like(np.asarray(xin, dtype=float), np.inf),
                      where=np.asarray(en) > 0)
    rho = down_step(ratio, *RATIO_CUT)
    rest = 1.0 - chi1
    return chi1, rest * (1.0 - rho), rest * rho


@dataclass(frozen=True)
class RegionPartition:
    """The three smooth cutoffs with their transition windows."""
    radial_cut: tuple = RADIAL_CUT
    ratio_cut: tuple = RATIO_CUT
    smoothing: float = CHI_SMOOTHING

    def chi1(self, xi, eta):
        return chi_partition(xi, eta)[0]

    def chi2(self, xi, eta):
        return chi_partition(xi, eta)[1]

    def chi3(self, xi, eta):
        return chi_partition(xi, eta)[2]


# ---------------------------------------------------------------------------
# numba scalar-family kernel
# ---------------------------------------------------------------------------

@numba.njit(cache=True, inline="always")
def _nb_smoothstep(t):
    if t <= 1e-3:
        return 0.0
    if t >= 1.0 - 1e-3:
        return 1.0
    a = math.exp(-1.0 / t)
    b = math.exp(-1.0 / (1.0 - t))
    return a / (a + b)


@numba.njit(cache=True, inline="always")
def _nb_theta(r):
    # same float expressions as dyadic.theta (up_step/down_step)
    return (_nb_smoothstep((r - 0.75) / 0.25)
            * _nb_smoothstep((8.0 / 3.0 - r) / (8.0 / 3.0 - 2.0)))


@numba.njit(cache=True, inline="always")
def _nb_psi(r):
    num = _nb_theta(r)
    if num == 0.0:
        return 0.0
    return num / (_nb_theta(0.5 * r) + num + _nb_theta(2.0 * r))


@numba.njit(cache=True, inline="always")
def _nb_chi_weight(xin, en, chi_sel):
    # chi_sel: 1, 2 or 3; same float expressions as chi_partition
    sigma = (math.sqrt(xin ** 2 + 0.2 * 0.2)
             + math.sqrt(en ** 2 + 0.2 * 0.2) - 2.0 * 0.2)
    chi1 = _nb_smoothstep(((2.0 - 2.0 * 0.2) - sigma) / ((2.0 - 2.0 * 0.2) - 1.0))
    if chi_sel == 1:
        return chi1
    if en == 0.0:
        rho = 0.0
    else:
        rho = _nb_smoothstep((0.2 - xin / en) / (0.2 - 1.0 / 6.0))
    if chi_sel == 3:
        return (1.0 - chi1) * rho
    return (1.0 - chi1) * (1.0 - rho)


@numba.njit(cache=True)
def _scalar_family_sum(kout, keta, cf, g_flat, n, dim, freq_step,
                       family, variant, chi_sel, l1, l2, psi_j):
    """Direct convolution for the mu/nu symbol family (plain sum, no constant).

    family: 0 -> l2(xi), 1 -> l2(xi - eta)
    variant: 0 -> e^{-|xi|^2} TF(a); 1 -> e^{-u}/a; 2 -> e^{-|xi|^2}/a; 3 -> 1/a
    chi_sel: -1 none, else chi_{1,2,3} weight
    psi_j: < -900 disables the psi(|eta|/2^j) dyadic weight
    """
    n_out = kout.shape[0]
    n_eta = keta.shape[0]
    out = np.zeros(n_out, dtype=np.complex128)
    eta_phys = keta.astype(np.float64) * freq_step
    en2 = np.zeros(n_eta)
    en = np.zeros(n_eta)
    l1e = np.zeros(n_eta)
    for e in range(n_eta):
        s = 0.0
        t = 0.0
        for a_ in range(dim):
            s += eta_phys[e, a_] * eta_phys[e, a_]
            t += l1[a_] * eta_phys[e, a_]
        en2[e] = s
        en[e] = math.sqrt(s)
        l1e[e] = t
    psi_scale = 2.0 ** psi_j if psi_j > -900.0 else 1.0
    for o in range(n_out):
        x2 = 0.0
        l2xi = 0.0
        for a_ in range(dim):
            xv = kout[o, a_] * freq_step
            x2 += xv * xv
            l2xi += l2[a_] * xv
        xin = math.sqrt(x2)
        exp_mx2 = math.exp(-x2)
        acc = 0.0 + 0.0j
        for e in range(n_eta):
            idx = 0
            for a_ in range(dim):
                idx = idx * n + ((kout[o, a_] - keta[e, a_]) % n)
            cg = g_flat[idx]
            if cg.real == 0.0 and cg.imag == 0.0:
                continue
            if chi_sel >= 1:
                w = _nb_chi_weight(xin, en[e], chi_sel)
                if w == 0.0:
                    continue
            else:
                w = 1.0
            gn2 = 0.0
            l2v = l2xi
            if family == 1:
                l2v = 0.0
            for a_ in range(dim):
                gv = kout[o, a_] * freq_step - eta_phys[e, a_]
                gn2 += gv * gv
                if family == 1:
                    l2v += l2[a_] * gv
            u = en2[e] + gn2
            a = x2 - u
            if variant == 0:
                if abs(a) < _TF_TAYLOR:
                    tf = exp_mx2 * (1.0 + a * (0.5 + a * (1.0 / 6.0 + a / 24.0)))
                else:
                    tf = (math.exp(-u) - exp_mx2) / a
            else:
                ac = a
                if abs(ac) < DENOM_CLAMP:
                    ac = -DENOM_CLAMP
                if variant == 1:
                    tf = math.exp(-u) / ac
                elif variant == 2:
                    tf = exp_mx2 / ac
                else:
                    tf = 1.0 / ac
            m = w * l1e[e] * l2v * tf
            if psi_j > -900.0:
                m *= _nb_psi(en[e] / psi_scale)
            acc += m * cf[e] * cg
        out[o] = acc
    return out


@numba.njit(cache=True)
def _t1_sum(kout, keta, cf, g_flat, n, dim, freq_step):
    """Direct convolution for T1 (before the output is written to the grid).

    cf: (n_eta, dim) coefficients of f; g_flat: (dim, n^dim) dense g.
    Returns (n_out, dim) with P(xi) applied per output frequency.
    """
    n_out = kout.shape[0]
    n_eta = keta.shape[0]
    out = np.zeros((n_out, dim), dtype=np.complex128)
    eta_phys = keta.astype(np.float64) * freq_step
    en2 = np.zeros(n_eta)
    for e in range(n_eta):
        s = 0.0
        for a_ in range(dim):
            s += eta_phys[e, a_] * eta_phys[e, a_]
        en2[e] = s
    acc = np.zeros(dim, dtype=np.complex128)
    gv = np.zeros(dim)
    for o in range(n_out):
        x2 = 0.0
        for a_ in range(dim):
            xv = kout[o, a_] * freq_step
            x2 += xv * xv
        exp_mx2 = math.exp(-x2)
        for a_ in range(dim):
            acc[a_] = 0.0 + 0.0j
        for e in range(n_eta):
            idx = 0
            for a_ in range(dim):
                idx = idx * n + ((kout[o, a_] - keta[e, a_]) % n)
            gn2 = 0.0
            dot = 0.0 + 0.0j
            for a_ in range(dim):
                gv[a_] = kout[o, a_] * freq_step - eta_phys[e, a_]
                gn2 += gv[a_] * gv[a_]
                dot += cf[e, a_] * gv[a_]
            if dot.real == 0.0 and dot.imag == 0.0:
                continue
            u = en2[e] + gn2
            a = x2 - u
            if abs(a) < _TF_TAYLOR:
                tf = exp_mx2 * (1.0 + a * (0.5 + a * (1.0 / 6.0 + a / 24.0)))
            else:
                tf = (math.exp(-u) - exp_mx2) / a
            for a_ in range(dim):
                acc[a_] += tf * dot * g_flat[a_, idx]
        if x2 > 0.0:
            xdot = 0.0 + 0.0j
            for a_ in range(dim):
                xdot += kout[o, a_] * freq_step * acc[a_]
            for a_ in range(dim):
                out[o, a_] = acc[a_] - kout[o, a_] * freq_step * xdot / x2
        else:
            for a_ in range(dim):
                out[o, a_] = acc[a_]
    return out


# ---------------------------------------------------------------------------
# fast-path plumbing
# ---------------------------------------------------------------------------

def _signed_modes(f: SpectralField):
    mask = np.any(np.abs(f.coef) > 0, axis=0)
    idx = np.argwhere(mask)
    n = f.grid.n
    signed = np.where(idx >= n // 2, idx - n, idx).astype(np.int64)
    coefs = np.ascontiguousarray(f.coef[(slice(None),) + tuple(idx.T)].T)
    return signed, coefs


def _output_modes(f: SpectralField, g: SpectralField) -> np.ndarray:
    """Signed lattice points inside the sum-set ball of the two supports."""
    grid = f.grid
    radius = 0.0
    for h in (f, g):
        signed, _ = _signed_modes(h)
        if len(signed):
            radius += float(np.sqrt((signed.astype(float) ** 2).sum(axis=1)).max())
    k = np.stack([c.astype(float) for c in grid.k_components()], axis=-1)
    mask = np.sqrt((k ** 2).sum(axis=-1)) <= radius + 1e-9
    idx = np.argwhere(mask)
    return np.where(idx >= grid.n // 2, idx - grid.n, idx).astype(np.int64)


def _scatter(grid, kout, values, tag):
    ncomp = 1 if tag == "scalar" else grid.dim
    out = np.zeros((ncomp,) + (grid.n,) * grid.dim, dtype=complex)
    idx = tuple((kout % grid.n).T)
    if values.ndim == 1:
        out[(0,) + idx] = values
    else:
        for c in range(ncomp):
            out[(c,) + idx] = values[:, c]
    return SpectralField(grid, out, tag)


_FAMILY_CODE = {"mu": 0, "nu": 1}
_VARIANT_CODE = {"full": 0, "prime": 1, "dprime": 2, "bare": 3}


def _family_fast_apply(family, variant, chi_sel, l1, l2, psi_j):
    def _apply(f: SpectralField, g: SpectralField) -> SpectralField:
        if f.grid != g.grid:
            raise ValueError("fields must share a grid")
        require_half_nyquist(f, g)
        if f.tag != "scalar" or g.tag != "scalar":
            raise ValueError("the scalar symbol family acts on scalar fields")
        grid = f.grid
        keta, cf = _signed_modes(f)
        if len(keta) == 0:
            return zero_field(grid, "scalar")
        kout = _output_modes(f, g)
        vals = _scalar_family_sum(
            kout, keta, np.ascontiguousarray(cf[:, 0]),
            g.coef[0].ravel(), grid.n, grid.dim, grid.freq_step,
            family, variant, chi_sel, np.asarray(l1, float), np.asarray(l2, float),
            psi_j)
        vals = vals * (2.0 * np.pi) ** (grid.dim / 2.0)
        return _scatter(grid, kout, vals, "scalar")
    return _apply


def _family_eval(xi, eta, family, variant, chi_sel, l1, l2, psi_j):
    """Vectorized numpy twin of the numba kernel (same formulas and branches)."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    xi, eta = np.broadcast_arrays(xi, eta)
    x2 = np.sum(xi * xi, axis=-1)
    en2 = np.sum(eta * eta, axis=-1)
    gv = xi - eta
    gn2 = np.sum(gv * gv, axis=-1)
    u = en2 + gn2
    a = x2 - u
    l1e = eta @ np.asarray(l1, float)
    l2v = (xi if family == 0 else gv) @ np.asarray(l2, float)
    if chi_sel >= 1:
        w = _chi_radial(np.sqrt(x2), np.sqrt(en2))[chi_sel - 1]
    else:
        w = np.ones_like(x2)
    if variant == 0:
        small = np.abs(a) < _TF_TAYLOR
        safe = np.where(small, 1.0, a)
        tf = np.where(small,
                      np.exp(-x2) * (1.0 + a * (0.5 + a * (1.0 / 6.0 + a / 24.0))),
                      (np.exp(-u) - np.exp(-x2)) / safe)
    else:
        ac = np.where(np.abs(a) < DENOM_CLAMP, -DENOM_CLAMP, a)
        if variant == 1:
            tf = np.exp(-u) / ac
        elif variant == 2:
            tf = np.exp(-x2) / ac
        else:
            tf = 1.0 / ac
    out = w * l1e * l2v * tf
    if psi_j > -900.0:
        from .dyadic import psi as psi_profile
        out = out * psi_profile(np.sqrt(en2) / 2.0 ** psi_j)
    return out


_MU_TABLE = {
    "mu": (0, -1), "mu1": (0, 1), "mu2": (0, 2), "mu3": (0, 3),
    "mu3p": (1, 3), "mu3pp": (2, 3),
}
_NU_TABLE = {
    "nu": (0, -1), "nu1": (0, 1), "nu2": (0, 2), "nu3": (0, 3),
    "nu3p": (1, 3), "nu3pp": (2, 3),
}


def _linear_forms(dim, l1, l2):
    if l1 is None:
        l1 = np.zeros(dim); l1[0] = 1.0
    if l2 is None:
        l2 = np.zeros(dim); l2[0] = 1.0
    l1 = np.asarray(l1, dtype=float)
    l2 = np.asarray(l2, dtype=float)
    if l1.shape != (dim,) or l2.shape != (dim,):
        raise ValueError("linear forms must be coefficient vectors of length dim")
    return l1, l2


def mu_symbols(which: str, l1=None, l2=None, dim: int = 2) -> Symbol:
    """Reduced symbols of the T2 analysis: mu and its region/time splits.

    mu   = e^{-|xi|^2} l1(eta) l2(xi) TF(a);  mu_i = chi_i mu;
    mu3p/mu3pp are the integrated-in-time pieces over the chi3 region,
    vanishing identically outside supp(chi3) where their denominator a is
    uniformly negative.
    """
    if which not in _MU_TABLE:
        raise ValueError(f"unknown mu-family member {which!r}")
    variant, chi_sel = _MU_TABLE[which]
    l1, l2 = _linear_forms(dim, l1, l2)

    def _eval(xi, eta, _v=variant, _c=chi_sel):
        return _family_eval(xi, eta, 0, _v, _c, l1, l2, -999.0)

    return Symbol(name=which, eval=_eval, value_kind="scalar",
                  params={"l1": tuple(l1), "l2": tuple(l2)},
                  fast_apply=_family_fast_apply(0, variant, chi_sel, l1, l2, -999.0))


def nu_symbols(which: str, l1=None, l2=None, j: int | None = None, dim: int = 2) -> Symbol:
    """Symbols of the T1 analysis: nu family plus the dyadic pieces N, N_j."""
    l1, l2 = _linear_forms(dim, l1, l2)
    if which in _NU_TABLE:
        variant, chi_sel = _NU_TABLE[which]
        psi_j = -999.0
        name = which
    elif which == "N":
        variant, chi_sel, psi_j, name = 3, 3, -999.0, "N"
    elif which == "Nj":
        if j is None:
            raise ValueError("Nj requires the dyadic index j")
        variant, chi_sel, psi_j, name = 3, 3, float(j), f"N{j}"
    else:
        raise ValueError(f"unknown nu-family member {which!r}")

    def _eval(xi, eta, _v=variant, _c=chi_sel, _pj=psi_j):
        return _family_eval(xi, eta, 1, _v, _c, l1, l2, _pj)

    return Symbol(name=name, eval=_eval, value_kind="scalar",
                  params={"l1": tuple(l1), "l2": tuple(l2), "j": j},
                  fast_apply=_family_fast_apply(1, variant, chi_sel, l1, l2, psi_j))


# ---------------------------------------------------------------------------
# T1 / T2 / Picard
# ---------------------------------------------------------------------------

DIV_FREE_TOL = 1e-8


def _check_t_inputs(f: SpectralField, g: SpectralField):
    if f.grid != g.grid:
        raise ValueError("fields must share a grid")
    if f.tag != "vector" or g.tag != "vector":
        raise ValueError("T1/T2 act on vector fields")
    require_half_nyquist(f, g)
    for h in (f, g):
        if divergence_ratio(h) > DIV_FREE_TOL:
            raise ValueError("T1/T2 inputs must be divergence-free")


def t1_apply(f: SpectralField, g: SpectralField) -> SpectralField:
    """T1 in closed symbol form (exact time integral per frequency pair)."""
    _check_t_inputs(f, g)
    grid = f.grid
    keta, cf = _signed_modes(f)
    if len(keta) == 0:
        return zero_field(grid, "vector")
    kout = _output_modes(f, g)
    g_flat = np.ascontiguousarray(g.coef.reshape(grid.dim, -1))
    vals = _t1_sum(kout, keta, np.ascontiguousarray(cf), g_flat,
                   grid.n, grid.dim, grid.freq_step)
    return _scatter(grid, kout, vals, "vector")


def t2_apply(f: SpectralField, g: SpectralField) -> SpectralField:
    """Symmetrized second-iterate operator, T2(f,g) = T1(f,g) + T1(g,f)."""
    return t1_apply(f, g) + t1_apply(g, f)


def advection_convolution(f: SpectralField, g: SpectralField) -> SpectralField:
    """Plain convolution  c_i(xi) = sum_eta [c_f(eta).(xi-eta)] c_{g,i}(xi-eta).

    Computed pseudo-spectrally (physical-space products), which is exact
    for inputs band-limited to half Nyquist.
    """
    grid = f.grid
    axes = tuple(range(grid.dim))
    freqs = grid.freq_components()
    fp = np.fft.ifftn(f.coef, axes=tuple(a + 1 for a in axes))
    out = np.empty_like(g.coef)
    for i in range(grid.dim):
        acc = np.zeros_like(fp[0])
        for k in range(grid.dim):
            gk = np.fft.ifftn(freqs[k] * g.coef[i], axes=axes)
            acc += fp[k] * gk
        out[i] = np.fft.fftn(acc, axes=axes) * grid.n ** grid.dim
    return SpectralField(grid, out, "vector")


def duhamel_bilinear_quadrature(f: SpectralField, g: SpectralField, t: float,
                                steps: int = 64) -> SpectralField:
    """The bilinear Duhamel term by Simpson quadrature in the time variable:

        P e^{t Lap} int_0^t e^{s |xi|^2} conv(e^{s Lap} f, e^{s Lap} g) ds,

    assembled stably as e^{-(t-s)|xi|^2} times the convolution of the
    heat-damped inputs.  At t = 1 this converges (4th order in steps) to
    t1_apply(f, g); it is the time-quadrature oracle for the closed form.
    """
    if f.grid != g.grid:
        raise ValueError("fields must share a grid")
    if steps < 16:
        raise ValueError("need at least 16 quadrature steps")
    require_half_nyquist(f, g)
    steps += steps % 2
    grid = f.grid
    s_nodes = np.linspace(0.0, t, steps + 1)
    w = np.ones(steps + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (t / steps) / 3.0
    r2 = grid.freq_radii_sq()
    acc = np.zeros_like(g.coef)
    for s, ws in zip(s_nodes, w):
        conv = advection_convolution(heat_propagate(f, s), heat_propagate(g, s))
        acc += ws * np.exp(-(t - s) * r2)[None] * conv.coef
    # the mean of the advection of mean-free divergence-free fields
    # vanishes; clear the rounding residue before projecting
    acc[(slice(None),) + (0,) * grid.dim] = 0.0
    return leray_project(SpectralField(grid, acc, "vector"))


def picard_iterate(u0: SpectralField, n: int, t: float, steps: int = 64) -> SpectralField:
    """Iterates of the heat-Duhamel scheme started from zero.

    n = 1 is the free heat flow e^{t Lap} u0; n = 2 adds the bilinear
    Duhamel term on the diagonal (u0, u0), with the s-integral by
    composite Simpson quadrature and the frequency convolution evaluated
    pseudo-spectrally per node.  The bilinear term matches t1_apply at
    t = 1 (the sign and the modulus-one gradient factor follow the
    closed-form convention of the operators above).  Iterates with n >= 3
    are out of scope.
    """
    if n not in (1, 2):
        raise ValueError("only the first and second iterates are supported")
    if u0.tag != "vector":
        raise ValueError("picard_iterate needs a vector initial field")
    if n == 1:
        return heat_propagate(u0, t)
    return heat_propagate(u0, t) + duhamel_bilinear_quadrature(u0, u0, t, steps)


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def nu3pp_offdiagonal_profile(f: SpectralField, g: SpectralField,
                              j_list, l1=None, l2=None):
    """Energy of B_{nu3''}(Delta_j f, Delta_k g) against the offset |j - k|.

    The high-high-to-low symbol should concentrate near the dyadic
    diagonal; rows report ||B(Delta_j f, Delta_k g)||_2 for each (j, k).
    """
    sym = nu_symbols("nu3pp", l1=l1, l2=l2, dim=f.grid.dim)
    rows = []
    blocks_f = {j: dyadic_block(f, j) for j in j_list}
    blocks_g = {k: dyadic_block(g, k) for k in j_list}
    for j in j_list:
        for k in j_list:
            out = sym.apply(blocks_f[j], blocks_g[k])
            rows.append({"j": j, "k": k, "offset": abs(j - k),
                         "energy": lp_norm(out, 2)})
    return rows
