import numpy as np
import pytest

from lplab.dyadic import PSI_SUPPORT
from lplab.grid import (SpectralField, field_from_coef, lp_norm, make_grid,
                        mode_field, symmetrize_real, zero_field)
from lplab.spaces import (BesovParams, b_minus1_inf_inf_heat, besov_norm,
                          bmo_carleson_norm, chemin_decay_check,
                          embedding_chain_constants, grad_bmo_carleson,
                          heat_b_minus1_inf2, norm_selector)
from conftest import random_scalar_field


def annulus_field(grid, j, seed, unit_sup=True):
    """Random field supported exactly on the dyadic annulus of scale j."""
    rng = np.random.default_rng(seed)
    radii = grid.freq_radii()
    mask = (radii >= PSI_SUPPORT[0] * 2.0 ** j) & (radii <= PSI_SUPPORT[1] * 2.0 ** j)
    coef = (rng.normal(size=mask.shape) + 1j * rng.normal(size=mask.shape)) * mask
    f = symmetrize_real(field_from_coef(grid, coef))
    if unit_sup:
        f = (1.0 / lp_norm(f, np.inf)) * f
    return f


def test_besov_single_plateau_block():
    # one real mode at |xi| = 1.5 * 2^2: only Delta_2 sees it, with weight 1
    g = make_grid(2, 64, 2 * np.pi)
    f = mode_field(g, (6, 0), amplitude=0.5, real=True)
    rep = besov_norm(f, BesovParams(-1.0, np.inf, 2.0))
    amp = lp_norm(f, np.inf)
    assert rep.value == pytest.approx(2.0 ** -2 * amp, rel=1e-12)
    live = [t for _, t in rep.per_block if t > 0]
    assert len(live) == 1


def test_besov_two_disjoint_blocks():
    g = make_grid(2, 64, 2 * np.pi)
    f = mode_field(g, (6, 0), amplitude=1.0, real=True)   # 1.5 * 2^2
    h = mode_field(g, (24, 0), amplitude=0.5, real=True)  # 1.5 * 2^4
    both = f + h
    a1 = lp_norm(f, np.inf)
    a2 = lp_norm(h, np.inf)
    for q in (1.0, 2.0, 3.0):
        rep = besov_norm(both, BesovParams(-1.0, np.inf, q))
        expected = ((2.0 ** -2 * a1) ** q + (2.0 ** -4 * a2) ** q) ** (1.0 / q)
        assert rep.value == pytest.approx(expected, rel=1e-10)
    rep = besov_norm(both, BesovParams(-1.0, np.inf, np.inf))
    assert rep.value == pytest.approx(max(2.0 ** -2 * a1, 2.0 ** -4 * a2), rel=1e-10)


def test_besov_q_monotone(grid64):
    f = random_scalar_field(grid64, 20, band=25)
    vals = [besov_norm(f, BesovParams(-1.0, np.inf, q)).value
            for q in (1.0, 2.0, 4.0, np.inf)]
    assert all(a >= b * (1 - 1e-12) for a, b in zip(vals, vals[1:]))


def test_besov_report_consistency(grid64):
    f = random_scalar_field(grid64, 21, band=25)
    rep = besov_norm(f, BesovParams(-1.0, np.inf, 2.0))
    assert rep.value == pytest.approx(rep.recompute(2.0), rel=1e-12)
    assert rep.truncation_tail < 1e-10 * lp_norm(f, np.inf)
    import json
    payload = json.loads(json.dumps(rep.to_dict()))
    assert payload["value"] == rep.value
    assert len(payload["per_block"]) == len(rep.per_block)


def test_besov_scale_invariance_under_dilation():
    # u(x) -> u(x/2)/2 on the doubled box shifts every block one scale down
    # and leaves the (s=-1, p=inf) norm unchanged
    g = make_grid(2, 128, 2 * np.pi)
    f = random_scalar_field(g, 22, band=30)
    g2 = make_grid(2, 128, 4 * np.pi)
    dilated = SpectralField(g2, 0.5 * f.coef.copy(), "scalar")
    for q in (2.0, np.inf):
        a = besov_norm(f, BesovParams(-1.0, np.inf, q)).value
        b = besov_norm(dilated, BesovParams(-1.0, np.inf, q)).value
        assert b == pytest.approx(a, rel=1e-9)


def test_heat_b2_zero_field(grid64):
    assert heat_b_minus1_inf2(zero_field(grid64)) == 0.0


def test_heat_b2_single_block_scaling(grid256):
    # heat characterization tracks 2^{-j} ||block||_inf within a stable factor
    ratios = []
    for j in (1, 3, 5):
        f = annulus_field(grid256, j, seed=30 + j)
        ratios.append(heat_b_minus1_inf2(f) / (2.0 ** -j * lp_norm(f, np.inf)))
    ratios = np.array(ratios)
    assert np.all(ratios > 0.2) and np.all(ratios < 2.0)
    assert ratios.max() / ratios.min() < 1.8


def test_heat_b2_warns_on_uncovered_content(grid64):
    f = random_scalar_field(grid64, 23, band=20)
    with pytest.warns(UserWarning):
        heat_b_minus1_inf2(f, t_quadrature=np.geomspace(1e-3, 1e-2, 8))


def test_b_inf_inf_single_mode_calculus_max():
    g = make_grid(2, 64, 2 * np.pi)
    k = 4.0
    f = mode_field(g, (4, 0), amplitude=0.5, real=True)
    amp = lp_norm(f, np.inf)
    t_grid = np.geomspace(1e-4, 10.0, 800)
    got = b_minus1_inf_inf_heat(f, t_grid)
    assert got == pytest.approx(amp / (k * np.sqrt(2 * np.e)), rel=1e-3)


def test_grad_bmo_zero_and_block_scaling(grid256):
    assert grad_bmo_carleson(zero_field(grid256)) == 0.0
    scaled = []
    for j in (0, 2, 4):
        f = annulus_field(grid256, j, seed=40 + j)
        scaled.append(grad_bmo_carleson(f) * 2.0 ** j)
    scaled = np.array(scaled)
    assert np.all(scaled > 0)
    assert scaled.max() / scaled.min() < 2.0


def test_bmo_constant_field_vanishes(grid64):
    f = zero_field(grid64)
    f.coef[0, 0, 0] = 3.0  # constant physical field
    assert bmo_carleson_norm(f) == 0.0


def test_bmo_single_block_unit_sup(grid256):
    for j in (0, 2, 4):
        f = annulus_field(grid256, j, seed=50 + j)
        v = bmo_carleson_norm(f)
        assert 0.0 < v <= 1.0


def test_bmo_dominated_by_sup_norm(grid256):
    worst = 0.0
    for seed in range(4):
        f = random_scalar_field(grid256, 60 + seed, band=40)
        worst = max(worst, bmo_carleson_norm(f) / lp_norm(f, np.inf))
    assert worst <= 1.0


def test_embedding_chain_on_ensemble(grid256):
    fields = [random_scalar_field(grid256, 70 + s, band=40) for s in range(5)]
    chain = embedding_chain_constants(fields)
    assert np.isfinite(chain["C"]) and chain["C"] > 0
    assert np.isfinite(chain["C_prime"]) and chain["C_prime"] > 0
    for row in chain["rows"]:
        assert row["binf_inf"] <= chain["C"] * row["grad_bmo"] * (1 + 1e-12)
        assert row["grad_bmo"] <= chain["C_prime"] * row["binf_2"] * (1 + 1e-12)


def test_heat_characterizations_track_block_norms():
    # two-sided ratio bands between the heat-route quantities and the
    # dyadic block norms, measured across a mixed ensemble
    g = make_grid(2, 128, 2 * np.pi)
    fields = [random_scalar_field(g, 500 + s, band=24) for s in range(8)]
    r_heat2, r_sup, r_lo, r_hi = [], [], [], []
    for f in fields:
        b2 = besov_norm(f, BesovParams(-1, np.inf, 2)).value
        binf = besov_norm(f, BesovParams(-1, np.inf, np.inf)).value
        gb = grad_bmo_carleson(f)
        r_heat2.append(heat_b_minus1_inf2(f) / b2)
        r_sup.append(b_minus1_inf_inf_heat(f) / binf)
        r_lo.append(binf / gb)
        r_hi.append(gb / b2)
    for ratios in (r_heat2, r_sup, r_lo, r_hi):
        ratios = np.array(ratios)
        assert np.all(np.isfinite(ratios)) and np.all(ratios > 0)
        assert ratios.max() < 10.0 and ratios.min() > 0.1


def test_chemin_zero_time_is_unity(grid256):
    f = annulus_field(grid256, 2, seed=80)
    assert chemin_decay_check(f, 2, 0.0) == pytest.approx(1.0, rel=1e-12)


def test_chemin_single_mode_exact():
    g = make_grid(2, 64, 2 * np.pi)
    for j in (1, 2):
        f = mode_field(g, (2 ** j, 0), real=True)
        ratio = chemin_decay_check(f, j, 1.0)
        assert ratio == pytest.approx(np.exp(-4.0 ** j), rel=1e-10)


def test_chemin_annulus_bound(grid256):
    for j in (0, 1, 2, 3):
        f = annulus_field(grid256, j, seed=90 + j)
        ratio = chemin_decay_check(f, j, 1.0)
        assert ratio <= np.exp(-0.5625 * 4.0 ** j) * (1 + 1e-9)


def test_chemin_rejects_empty_block(grid64):
    f = mode_field(grid64, (1, 0), real=True)
    with pytest.raises(ValueError):
        chemin_decay_check(f, 5, 1.0)


def test_norm_selector_registry(grid64):
    f = random_scalar_field(grid64, 95, band=20)
    assert norm_selector("l2")(f) == pytest.approx(lp_norm(f, 2))
    assert norm_selector("besov:-1,inf,2")(f) == pytest.approx(
        besov_norm(f, BesovParams(-1, np.inf, 2)).value)
    with pytest.raises(ValueError):
        norm_selector("nope")
