"""Grid-free dyadic-bump data and the high-high-to-low inflation experiment.

The data are divergence-free fields on R^3 given directly by their Fourier
transform: for k = 10..N, a pair of smooth bumps of radius 3 centered at
+-2^k e1 with amplitude 2^k alpha_k, polarized along (xi/|xi|) x e2:

    fhatN(xi) = sum_k 2^k alpha_k [phi(xi - 2^k e1) - phi(xi + 2^k e1)]
                (xi/|xi| x e2).

Output frequencies near xi0 = (0, 1/2, 1/2) are reachable only by a +k
bump paired with the matching -k bump (all other center sums sit at
distance >= 2^9 from the ball |zeta| < 1), so the bilinear second-iterate
output there collapses to one compactly supported eta-integral:

    T1hat(zeta) = -e^{-|zeta|^2} int phi(|eta|) phi(|zeta-eta|)
                   sum_k alpha_k^2 [B_k^+(zeta,eta) + B_k^-(zeta,eta)] deta

with per-scale bracket factors (u = eta +- 2^k e1, v = zeta - eta -+ 2^k e1)

    B_k^{+-} = 2^{2k} TF(a) [zeta . (u/|u| x e2)] P(zeta) (v/|v| x e2),
    a = |zeta|^2 - |u|^2 - |v|^2,   TF(a) = int_0^1 e^{sa} ds = expm1(a)/a.

The leading minus sign is the product of the opposite signs carried by the
two interacting bump families.  As k grows, B_k^{+-} -> (0, 1/8, -1/8) and
the scalar part 2^{2k} TF(a) (u/|u| x e2)_3 (v/|v| x e2)_3 -> -1/2, so
every scale pushes the third component the same way and the output at xi0
grows like sum_k alpha_k^2: bounded data (any (alpha_k) outside l^2 but in
l^q, q > 2) with divergent second iterate.

Everything here is evaluated analytically in eta; frequencies 2^k far
beyond any usable FFT lattice cost nothing because the integrals live on
the bump overlap only.  At very large k the exponent a ~ -2^{2k+1}
underflows e^a to zero, which is the correct limit; 2^{2k}/a is a ratio of
like-sized quantities and stays accurate through k = 60.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dyadic import psi as dyadic_psi
from .profiles import down_step, down_step_jet

XI0 = np.array([0.0, 0.5, 0.5])
K_MIN = 10
N_CAP = 60


def phi_profile(r):
    """Radial bump: 1 for r <= 2, smooth monotone drop to 0 at r = 3."""
    return down_step(r, 2.0, 3.0)


def phi_jet(r):
    """Value and four derivatives of the bump profile."""
    return down_step_jet(r, 2.0, 3.0)


def alpha_sequence(kind: str, k):
    """Amplitude sequences: 'lq_not_l2' -> k^{-1/2} (in every l^q, q > 2,
    not in l^2); 'l2_control' -> k^{-1} (square-summable control case)."""
    k = np.asarray(k, dtype=float)
    if np.any(k < K_MIN):
        raise ValueError(f"bump indices start at k = {K_MIN}")
    if kind == "lq_not_l2":
        out = k ** -0.5
    elif kind == "l2_control":
        out = 1.0 / k
    else:
        raise ValueError(f"unknown alpha sequence {kind!r}")
    return out if out.shape else float(out)


@dataclass(frozen=True)
class BumpSpec:
    """Top index N plus the amplitude sequence alpha_k for k = 10..N."""
    n_top: int
    alpha: tuple

    def __post_init__(self):
        if self.n_top < K_MIN:
            raise ValueError(f"n_top must be at least {K_MIN}")
        if self.n_top > N_CAP:
            raise ValueError(f"n_top capped at {N_CAP} (double precision budget)")
        if len(self.alpha) != self.n_top - K_MIN + 1:
            raise ValueError("alpha must cover k = 10..n_top")

    @property
    def ks(self) -> np.ndarray:
        return np.arange(K_MIN, self.n_top + 1)

    def alpha_at(self, k: int) -> float:
        return self.alpha[k - K_MIN]

    def sum_alpha_sq(self, n: int | None = None) -> float:
        n = self.n_top if n is None else n
        return float(np.sum(np.asarray(self.alpha[: n - K_MIN + 1]) ** 2))


def make_bump_spec(n_top: int, kind: str = "lq_not_l2") -> BumpSpec:
    ks = np.arange(K_MIN, n_top + 1)
    return BumpSpec(n_top=n_top, alpha=tuple(alpha_sequence(kind, ks)))


@dataclass(frozen=True)
class BumpField:
    """Analytic (grid-free) field: evaluates the Fourier transform directly.

    Exactly divergence-free (xi . (xi x e2) = 0) and even real-valued on
    the Fourier side, so the physical field is real.
    """
    spec: BumpSpec

    def __call__(self, xi) -> np.ndarray:
        return fN_fourier(self.spec, xi)


def single_bump_spec(k: int, amplitude: float = 1.0) -> BumpSpec:
    alpha = np.zeros(k - K_MIN + 1)
    alpha[-1] = amplitude
    return BumpSpec(n_top=k, alpha=tuple(alpha))


def _cross_e2(v):
    """v x e2 = (-v3, 0, v1), vectorized over (..., 3)."""
    out = np.zeros_like(v)
    out[..., 0] = -v[..., 2]
    out[..., 2] = v[..., 0]
    return out


def fN_fourier(spec: BumpSpec, xi) -> np.ndarray:
    """The Fourier transform of the bump field at xi, shape (..., 3).

    At most one bump covers any given xi; the sum over k costs little and
    keeps the expression literal.
    """
    xi = np.asarray(xi, dtype=float)
    scalar_in = xi.ndim == 1
    xi = np.atleast_2d(xi)
    norm = np.linalg.norm(xi, axis=-1)
    dir_vec = np.zeros_like(xi)
    live = norm > 0
    dir_vec[live] = _cross_e2(xi[live]) / norm[live][..., None]
    amp = np.zeros(xi.shape[:-1])
    for k in spec.ks:
        center = 2.0 ** k
        shift_p = xi.copy(); shift_p[..., 0] -= center
        shift_m = xi.copy(); shift_m[..., 0] += center
        amp += center * spec.alpha_at(k) * (
            phi_profile(np.linalg.norm(shift_p, axis=-1))
            - phi_profile(np.linalg.norm(shift_m, axis=-1)))
    out = amp[..., None] * dir_vec
    return out[0] if scalar_in else out


@dataclass
class BumpNormReport:
    """Dyadic-norm estimates of the bump field: upper and lower routes.

    Per block j, the sup norm of the block is bounded above by the L^1
    mass of its Fourier data (times (2 pi)^{-3/2}) and below by the field
    value at the origin, where every bump oscillation peaks in phase.
    """
    q: float
    upper: float
    lower: float
    per_block: list  # (j, 2^{-j} upper_j, 2^{-j} lower_j)


def fN_besov_norm(spec: BumpSpec, q: float, nodes: int = 24,
                  half_width: float = 3.2) -> BumpNormReport:
    """(s = -1, p = inf) dyadic norm estimates of the bump field in l^q.

    Semi-analytic: each bump meets exactly the two blocks j = k-1, k, and
    both bump signs contribute identical block masses, so one quadrature
    window per scale suffices.  Values are scale-free in k by design
    (Fourier mass 2^k alpha_k O(1), weighted by 2^{-j} ~ 2^{-k}).
    """
    if not (q > 2):
        raise ValueError("the bump data target summability q > 2")
    pts, w = midpoint_nodes(nodes, half_width)
    phi_w = phi_profile(np.linalg.norm(pts, axis=-1))
    live = phi_w > 0
    pts, phi_w = pts[live], phi_w[live]
    const = (2.0 * np.pi) ** -1.5
    upper_j = {}
    lower_j = {}
    for k in spec.ks:
        amp = 2.0 ** k * spec.alpha_at(k)
        if amp == 0.0:
            continue
        xi = pts.copy()
        xi[:, 0] += 2.0 ** k
        norms = np.linalg.norm(xi, axis=-1)
        dir_vec = _cross_e2(xi) / norms[:, None]
        for j in (k - 1, k):
            wp = dyadic_psi(norms / 2.0 ** j)
            if not np.any(wp > 0):
                continue
            # both bump signs add the same mass (factor 2)
            up = 2.0 * amp * w * np.sum(wp * phi_w * np.linalg.norm(dir_vec, axis=-1))
            low = 2.0 * amp * w * np.sum((wp * phi_w)[:, None] * dir_vec, axis=0)
            upper_j[j] = upper_j.get(j, 0.0) + const * up
            lower_j[j] = lower_j.get(j, np.zeros(3)) + const * low
    per_block = [(j, 2.0 ** -j * upper_j[j],
                  2.0 ** -j * float(np.linalg.norm(lower_j[j])))
                 for j in sorted(upper_j)]
    ups = np.array([u for _, u, _ in per_block])
    lows = np.array([lo for _, _, lo in per_block])
    if np.isinf(q):
        upper, lower = float(ups.max()), float(lows.max())
    else:
        upper = float(np.sum(ups ** q) ** (1.0 / q))
        lower = float(np.sum(lows ** q) ** (1.0 / q))
    return BumpNormReport(q=q, upper=upper, lower=lower, per_block=per_block)


def leray_matrix(zeta) -> np.ndarray:
    """P(zeta) = Id - zeta zeta^T / |zeta|^2 (identity at zeta = 0)."""
    zeta = np.asarray(zeta, dtype=float)
    n2 = float(zeta @ zeta)
    if n2 == 0.0:
        return np.eye(3)
    return np.eye(3) - np.outer(zeta, zeta) / n2


def _stable_tf(a):
    """int_0^1 e^{sa} ds for very negative a: expm1(a)/a, exact underflow."""
    a = np.asarray(a, dtype=float)
    small = np.abs(a) < 1e-4
    safe = np.where(small, 1.0, a)
    return np.where(small, 1.0 + a * (0.5 + a * (1.0 / 6.0 + a / 24.0)),
                    np.expm1(safe) / safe)


def bracket_factor(k: int, zeta, eta, sign: int) -> np.ndarray:
    """Per-scale integrand factor B_k^{sign}(zeta, eta), shape (..., 3).

    Tends to (0, 1/8, -1/8) as k grows, uniformly over the bump overlap.
    """
    zeta = np.asarray(zeta, dtype=float)
    eta = np.asarray(eta, dtype=float)
    scalar_in = eta.ndim == 1
    eta = np.atleast_2d(eta)
    center = sign * 2.0 ** k
    u = eta.copy(); u[..., 0] += center
    v = zeta - eta; v[..., 0] -= center
    un2 = np.sum(u * u, axis=-1)
    vn2 = np.sum(v * v, axis=-1)
    a = float(zeta @ zeta) - un2 - vn2
    scale = 4.0 ** k * _stable_tf(a)
    s1 = (_cross_e2(u) @ zeta) / np.sqrt(un2)
    w = _cross_e2(v) / np.sqrt(vn2)[..., None]
    pw = w @ leray_matrix(zeta).T
    out = (scale * s1)[..., None] * pw
    return out[0] if scalar_in else out


def scalar_ratio_factor(k: int, zeta, eta, sign: int):
    """2^{2k} TF(a) (u/|u| x e2)_3 (v/|v| x e2)_3; tends to -1/2."""
    zeta = np.asarray(zeta, dtype=float)
    eta = np.asarray(eta, dtype=float)
    center = sign * 2.0 ** k
    u = eta.copy(); u[..., 0] += center
    v = zeta - eta; v[..., 0] -= center
    un2 = np.sum(u * u, axis=-1)
    vn2 = np.sum(v * v, axis=-1)
    a = float(zeta @ zeta) - un2 - vn2
    return (4.0 ** k * _stable_tf(a)
            * _cross_e2(u)[..., 2] / np.sqrt(un2)
            * _cross_e2(v)[..., 2] / np.sqrt(vn2))


def midpoint_nodes(nodes: int, half_width: float = 3.2):
    """Tensor midpoint rule on [-w, w]^3: nodes (m^3, 3) and the cell weight."""
    h = 2.0 * half_width / nodes
    axis = -half_width + h * (np.arange(nodes) + 0.5)
    mesh = np.meshgrid(axis, axis, axis, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    return pts, h ** 3


def _bracket_integrals(k_top: int, zeta, nodes: int, half_width: float = 3.2) -> np.ndarray:
    """J_k = int phi(|eta|) phi(|zeta-eta|) [B_k^+ + B_k^-] deta for k = 10..k_top."""
    zeta = np.asarray(zeta, dtype=float)
    pts, w = midpoint_nodes(nodes, half_width)
    weight = phi_profile(np.linalg.norm(pts, axis=-1)) \
        * phi_profile(np.linalg.norm(zeta - pts, axis=-1))
    live = weight > 0
    pts, weight = pts[live], weight[live]
    out = np.empty((k_top - K_MIN + 1, 3))
    for i, k in enumerate(range(K_MIN, k_top + 1)):
        integrand = (bracket_factor(k, zeta, pts, +1)
                     + bracket_factor(k, zeta, pts, -1))
        out[i] = w * (weight[:, None] * integrand).sum(axis=0)
    return out


@dataclass
class InflationValue:
    """Quadrature evaluation of T1hat near xi0 with its refinement check."""
    vector: np.ndarray          # the 3-vector T1hat(zeta)
    refinement_change: float    # relative change of the third component, coarse vs fine
    flagged: bool               # True when that change exceeds 1%


def t1_hat_at(spec: BumpSpec, zeta, nodes: int = 48, half_width: float = 3.2,
              refine_check: bool = True, coarse_nodes: int = 32) -> InflationValue:
    """T1hat(zeta) for the bump field, by tensor midpoint quadrature.

    Valid for |zeta - xi0| < 1/4, where only matching-scale opposite bumps
    can interact.  The result is refined-checked against a coarser node
    count; a relative change above 1% flags the value.
    """
    zeta = np.asarray(zeta, dtype=float)
    if np.linalg.norm(zeta - XI0) >= 0.25:
        raise ValueError("t1_hat_at is specialized to the neighborhood of xi0")
    alpha_sq = np.asarray(spec.alpha) ** 2
    damp = np.exp(-float(zeta @ zeta))

    def value(n_nodes):
        J = _bracket_integrals(spec.n_top, zeta, n_nodes, half_width)
        return -damp * (alpha_sq[:, None] * J).sum(axis=0)

    vec = value(nodes)
    change = 0.0
    if refine_check:
        coarse = value(coarse_nodes)
        denom = abs(vec[2]) if vec[2] != 0 else 1.0
        change = abs(vec[2] - coarse[2]) / denom
    return InflationValue(vector=vec, refinement_change=change,
                          flagged=change >= 0.01)


def zeta_samples(eps: float = 0.05, count: int = 5) -> np.ndarray:
    """Deterministic sample points in the ball B(xi0, eps)."""
    dirs = np.array([
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, -1.0],
        [-0.577, 0.577, 0.577],
        [0.577, -0.577, 0.577],
        [0.5, 0.5, -0.5],
    ])
    return XI0 + eps * 0.9 * dirs[:count]


def inflation_experiment(N_list, alpha_kind: str = "lq_not_l2",
                         zeta_eps: float = 0.05, zeta_count: int = 5,
                         nodes: int = 48, half_width: float = 3.2) -> dict:
    """Third-component growth of T1hat against the partial sums of alpha_k^2.

    For each N and each zeta sample: |T1hat(zeta)_3|, the reference sum
    sum_{k=10}^N alpha_k^2, and their ratio.  The summary reports the ratio
    band [c, C] over all (N, zeta), per-zeta monotonicity of the value in
    N, and the coarse-vs-fine quadrature check at the largest N.
    """
    N_list = sorted(int(n) for n in N_list)
    top = N_list[-1]
    spec = make_bump_spec(top, alpha_kind)
    zetas = zeta_samples(zeta_eps, zeta_count)
    alpha_sq = np.asarray(spec.alpha) ** 2
    rows = []
    refinement = []
    monotone = True
    for zi, zeta in enumerate(zetas):
        J_fine = _bracket_integrals(top, zeta, nodes, half_width)
        J_coarse = _bracket_integrals(top, zeta, 32, half_width)
        damp = np.exp(-float(zeta @ zeta))
        prev = -np.inf
        for N in N_list:
            m = N - K_MIN + 1
            vec = -damp * (alpha_sq[:m, None] * J_fine[:m]).sum(axis=0)
            vec_c = -damp * (alpha_sq[:m, None] * J_coarse[:m]).sum(axis=0)
            value = abs(vec[2])
            ref = spec.sum_alpha_sq(N)
            rows.append({"N": N, "zeta_id": zi,
                         "value_third_component": value,
                         "sum_alpha_sq": ref, "ratio": value / ref,
                         "first_component": abs(vec[0]),
                         "refinement_change": abs(vec[2] - vec_c[2]) / value})
            monotone &= value > prev
            prev = value
        refinement.append(rows[-1]["refinement_change"])
    ratios = np.array([r["ratio"] for r in rows])
    summary = {
        "alpha": alpha_kind,
        "band_low": float(ratios.min()),
        "band_high": float(ratios.max()),
        "band_spread": float(ratios.max() / ratios.min()),
        "monotone_in_N": bool(monotone),
        "max_refinement_change": float(np.max(refinement)),
        "nodes": nodes,
        "zeta_eps": zeta_eps,
    }
    return {"rows": rows, "summary": summary}


def interaction_gap(n_top: int, zeta_bound: float = 0.25) -> float:
    """Smallest distance from B(xi0, zeta_bound) to any non-matching center sum.

    Center sums s 2^k + s' 2^k' (excluding the matching pairs k = k',
    s = -s') all sit at distance >= 2^{k_min - 1} from the origin; a
    positive gap certifies that no other interaction reaches the output
    window once bump radii (3 each) are accounted for.
    """
    best = np.inf
    reach = np.linalg.norm(XI0) + zeta_bound + 6.0
    for k in range(K_MIN, n_top + 1):
        for kp in range(K_MIN, n_top + 1):
            for s in (1, -1):
                for sp in (1, -1):
                    if k == kp and s == -sp:
                        continue
                    best = min(best, abs(s * 2.0 ** k + sp * 2.0 ** kp) - reach)
    return float(best)


def t1_lattice_at(spec: BumpSpec, zeta, spacing: float = 0.5, pad: float = 3.4) -> np.ndarray:
    """Frequency-lattice Riemann sum of the un-reorganized bilinear integral.

    Sums P(zeta) e^{-|zeta|^2} TF(a) [fhat(eta).(zeta-eta)] fhat(zeta-eta)
    over eta in (spacing Z)^3 restricted to the bump supports, times the
    cell volume: exactly the value a periodic surrogate with frequency step
    ``spacing`` assigns to T1hat(zeta).  Independent of the reorganized
    route: the full two-sum fhat is evaluated at the lattice points.
    """
    zeta = np.asarray(zeta, dtype=float)
    reach = int(np.ceil(pad / spacing))
    ax = spacing * np.arange(-reach, reach + 1)  # window on the global lattice
    mesh = np.meshgrid(ax, ax, ax, indexing="ij")
    box = np.stack([m.ravel() for m in mesh], axis=-1)
    total = np.zeros(3, dtype=float)
    for k in spec.ks:
        if spec.alpha_at(k) == 0.0:
            continue
        for sign in (1, -1):
            eta = box.copy()
            eta[:, 0] += sign * 2.0 ** k  # bump centers are lattice multiples
            f_eta = fN_fourier(spec, eta)
            g_xi = fN_fourier(spec, zeta - eta)
            live = np.any(f_eta != 0, axis=-1) & np.any(g_xi != 0, axis=-1)
            if not live.any():
                continue
            eta, f_eta, g_xi = eta[live], f_eta[live], g_xi[live]
            vmg = zeta - eta
            a = (float(zeta @ zeta) - np.sum(eta * eta, axis=-1)
                 - np.sum(vmg * vmg, axis=-1))
            tf = _stable_tf(a)
            dot = np.sum(f_eta * vmg, axis=-1)
            total += (tf * dot) @ g_xi
    total *= spacing ** 3 * np.exp(-float(zeta @ zeta))
    return leray_matrix(zeta) @ total
