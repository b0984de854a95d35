"""Smooth cutoff profiles built from the exponential smoothstep.

Every compactly supported smooth cutoff in the toolkit (dyadic annulus
profile, frequency-region cutoffs, counterexample bump) is assembled from
the same C-infinity step

    S(t) = g(t) / (g(t) + g(1 - t)),    g(t) = exp(-1/t) for t > 0 else 0,

which is exactly 0 for t <= 0 and exactly 1 for t >= 1.  Derivatives up to
order 4 are produced analytically through small "jet" arrays (value plus
first four derivatives), so downstream smoothness checks do not rely on
finite differences.
"""
from __future__ import annotations

import math

import numpy as np

JET_ORDER = 4  # value + 4 derivatives

# d^n/dt^n exp(-1/t) = exp(-1/t) * P_n(1/t); coefficients of P_n in u = 1/t,
# from the recursion P_{n+1}(u) = u^2 (P_n(u) - P_n'(u)), P_0 = 1.
_G_POLYS = (
    np.array([1.0]),                                  # P_0
    np.array([0.0, 0.0, 1.0]),                        # u^2
    np.array([0.0, 0.0, 0.0, -2.0, 1.0]),             # u^4 - 2 u^3
    np.array([0.0, 0.0, 0.0, 0.0, 6.0, -6.0, 1.0]),   # u^6 - 6 u^5 + 6 u^4
    np.array([0.0, 0.0, 0.0, 0.0, 0.0, -24.0, 36.0, -12.0, 1.0]),
)

_BINOM = np.array([[math.comb(n, k) for k in range(JET_ORDER + 1)]
                   for n in range(JET_ORDER + 1)], dtype=float)

# Below this t, exp(-1/t) underflows to exactly 0.0 in float64, and so do
# all four derivatives; skipping the formulas avoids 0 * inf = nan.
_T_FLOOR = 1e-3


def g_jet(t):
    """Jet of g(t) = exp(-1/t) (0 for t <= 0): array of shape (5,) + t.shape."""
    t = np.asarray(t, dtype=float)
    out = np.zeros((JET_ORDER + 1,) + t.shape)
    live = t > _T_FLOOR
    if np.any(live):
        tl = t[live]
        u = 1.0 / tl
        base = np.exp(-u)
        for n in range(JET_ORDER + 1):
            out[n][live] = base * np.polyval(_G_POLYS[n][::-1], u)
    return out


def jet_mul(a, b):
    """Leibniz product of two jets."""
    out = np.zeros_like(a)
    for n in range(JET_ORDER + 1):
        for k in range(n + 1):
            out[n] += _BINOM[n, k] * a[k] * b[n - k]
    return out


def jet_div(num, den):
    """Jet of num/den; den[0] must be nonzero wherever the result is used."""
    out = np.zeros_like(num)
    d0 = np.where(den[0] == 0.0, 1.0, den[0])
    out[0] = num[0] / d0
    for n in range(1, JET_ORDER + 1):
        acc = num[n].copy()
        for k in range(1, n + 1):
            acc -= _BINOM[n, k] * den[k] * out[n - k]
        out[n] = acc / d0
    return out


def jet_affine(jet, scale):
    """Jet of t -> f(scale * t + b) given the jet of f at scale*t+b."""
    out = jet.copy()
    for n in range(JET_ORDER + 1):
        out[n] *= scale ** n
    return out


def jet_const(value, shape):
    out = np.zeros((JET_ORDER + 1,) + shape)
    out[0] = value
    return out


def smoothstep_jet(t):
    """Jet of S(t): 0 for t <= 0, 1 for t >= 1, strictly increasing between."""
    t = np.asarray(t, dtype=float)
    gt = g_jet(t)
    g1t = jet_affine(g_jet(1.0 - t), -1.0)
    s = jet_div(gt, gt + g1t)
    # clamp plateaus exactly
    lo = t <= 0.0
    hi = t >= 1.0
    s[0][lo] = 0.0
    s[0][hi] = 1.0
    s[1:, lo] = 0.0
    s[1:, hi] = 0.0
    return s


def smoothstep(t):
    """S(t) values only (cheap path, no derivative bookkeeping)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    out[t >= 1.0] = 1.0
    mid = (t > 0.0) & (t < 1.0)
    if np.any(mid):
        tm = t[mid]
        a = np.exp(-1.0 / np.maximum(tm, _T_FLOOR)) * (tm > _T_FLOOR)
        b = np.exp(-1.0 / np.maximum(1.0 - tm, _T_FLOOR)) * ((1.0 - tm) > _T_FLOOR)
        out[mid] = a / (a + b)
    return out if out.shape else float(out)


def up_step(r, a, b):
    """0 for r <= a, 1 for r >= b, smooth monotone transition on [a, b]."""
    return smoothstep((np.asarray(r, dtype=float) - a) / (b - a))


def down_step(r, a, b):
    """1 for r <= a, 0 for r >= b, smooth monotone transition on [a, b]."""
    return smoothstep((b - np.asarray(r, dtype=float)) / (b - a))


def up_step_jet(r, a, b):
    return jet_affine(smoothstep_jet((np.asarray(r, dtype=float) - a) / (b - a)),
                      1.0 / (b - a))


def down_step_jet(r, a, b):
    return jet_affine(smoothstep_jet((b - np.asarray(r, dtype=float)) / (b - a)),
                      -1.0 / (b - a))
