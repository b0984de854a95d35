import numpy as np
import pytest

from lplab.grid import (AliasingError, SpectralField, band_limit_ball,
                        band_limit_chebyshev, conj_asymmetry, divergence_ratio,
                        field_from_coef, from_physical, heat_propagate,
                        leray_project, load_field, lp_norm, make_grid,
                        mode_field, require_half_nyquist, save_field,
                        symmetrize_real, to_physical, zero_field)
from conftest import random_divfree_field, random_scalar_field


def test_make_grid_unit_lattice():
    g = make_grid(2, 64, 2 * np.pi)
    assert g.freq_step == pytest.approx(1.0)
    assert max(abs(k) for k in g.k_axis()) == 32


def test_make_grid_symmetric_truncation_3d():
    g = make_grid(3, 8, 2 * np.pi)
    ks = sorted(g.k_axis().tolist())
    assert ks == [-4, -3, -2, -1, 0, 1, 2, 3]


def test_make_grid_rejects_bad_sizes():
    with pytest.raises(ValueError):
        make_grid(2, 100, 1.0)
    with pytest.raises(ValueError):
        make_grid(2, 64, -1.0)
    with pytest.raises(ValueError):
        make_grid(4, 64, 1.0)
    with pytest.raises(ValueError):
        make_grid(2, 4, 1.0)


def test_fft_roundtrip(grid64):
    f = random_scalar_field(grid64, 0, band=30)
    back = from_physical(grid64, to_physical(f))
    assert np.max(np.abs(back.coef - f.coef)) < 1e-12 * np.max(np.abs(f.coef))


def test_heat_single_mode(grid64):
    f = mode_field(grid64, (2, 0))
    out = heat_propagate(f, 0.25)
    assert out.coef[0, 2, 0] == pytest.approx(np.exp(-1.0), rel=1e-14)


def test_heat_zero_time_identity(grid64):
    f = random_scalar_field(grid64, 1, band=20)
    out = heat_propagate(f, 0.0)
    assert np.array_equal(out.coef, f.coef)


def test_heat_rejects_negative_time(grid64):
    with pytest.raises(ValueError):
        heat_propagate(zero_field(grid64), -0.5)


def test_heat_semigroup(grid64):
    f = random_scalar_field(grid64, 2, band=20)
    once = heat_propagate(f, 0.7)
    split = heat_propagate(heat_propagate(f, 0.3), 0.4)
    assert np.max(np.abs(once.coef - split.coef)) < 1e-12 * np.max(np.abs(once.coef))


def test_heat_matches_physical_convolution_oracle():
    # Gaussian-profile field against direct convolution with the periodized
    # heat kernel, summed point by point on the grid
    g = make_grid(2, 64, 2 * np.pi)
    x = np.arange(g.n) * (g.period / g.n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    samples = np.exp(-((X - np.pi) ** 2 + (Y - np.pi) ** 2) / 0.8)
    f = from_physical(g, samples)
    t = 1.0
    evolved = np.real(to_physical(heat_propagate(f, t))[0])

    h = g.period / g.n
    images = np.arange(-2, 3) * g.period
    gx = x[:, None] - x[None, :]
    kern1d = np.zeros_like(gx)
    for m in images:
        kern1d += np.exp(-((gx + m) ** 2) / (4 * t))
    kern1d *= h / np.sqrt(4 * np.pi * t)
    oracle = kern1d @ samples @ kern1d.T  # separable periodic convolution
    assert np.max(np.abs(evolved - oracle)) < 1e-8 * np.max(np.abs(oracle))


def test_heat_preserves_real_symmetry_and_divergence(grid16_3d):
    v = random_divfree_field(grid16_3d, 3, band=5)
    out = heat_propagate(v, 0.4)
    assert conj_asymmetry(out) < 1e-12
    assert divergence_ratio(out) < 1e-10


def test_leray_matrix_at_paper_point():
    # P at (0, 1/2, 1/2) acting on basis vectors
    g = make_grid(3, 16, 4 * np.pi)  # freq step 1/2 puts (0,1,1) at (0,.5,.5)
    v = zero_field(g, "vector")
    expected = np.array([[1, 0, 0], [0, 0.5, -0.5], [0, -0.5, 0.5]])
    for col in range(3):
        v.coef[:] = 0
        v.coef[col, 0, 1, 1] = 1.0
        out = leray_project(v)
        got = out.coef[:, 0, 1, 1].real
        assert np.allclose(got, expected[:, col], atol=1e-14)


def test_leray_along_and_across(grid16_3d):
    v = zero_field(grid16_3d, "vector")
    v.coef[0, 1, 0, 0] = 1.0  # e1 component at xi = e1
    out = leray_project(v)
    assert np.max(np.abs(out.coef)) < 1e-15
    v = zero_field(grid16_3d, "vector")
    v.coef[1, 1, 0, 0] = 1.0  # e2 component at xi = e1
    out = leray_project(v)
    assert out.coef[1, 1, 0, 0] == pytest.approx(1.0)


def test_leray_idempotent(grid16_3d):
    rng = np.random.default_rng(4)
    coef = rng.normal(size=(3, 16, 16, 16)) + 1j * rng.normal(size=(3, 16, 16, 16))
    v = SpectralField(grid16_3d, coef, "vector")
    v.coef[:, 0, 0, 0] = 0
    once = leray_project(v)
    twice = leray_project(once)
    assert np.max(np.abs(twice.coef - once.coef)) < 1e-12
    assert divergence_ratio(once) < 1e-10


def test_leray_preserves_real_symmetry(grid16_3d):
    # below the Nyquist shell, where every mode has its mirror partner
    rng = np.random.default_rng(10)
    coef = rng.normal(size=(3, 16, 16, 16)) + 1j * rng.normal(size=(3, 16, 16, 16))
    v = symmetrize_real(band_limit_ball(SpectralField(grid16_3d, coef, "vector"), 7))
    v.coef[:, 0, 0, 0] = 0
    assert conj_asymmetry(leray_project(v)) < 1e-12


def test_leray_warns_on_mean_mode(grid16_3d):
    v = zero_field(grid16_3d, "vector")
    v.coef[0, 0, 0, 0] = 1.0
    with pytest.warns(UserWarning):
        leray_project(v)


def test_leray_rejects_scalar(grid64):
    with pytest.raises(ValueError):
        leray_project(zero_field(grid64, "scalar"))


def test_lp_norm_unit_mode_parseval(grid64):
    f = mode_field(grid64, (3, 4))
    assert lp_norm(f, 2) == pytest.approx((2 * np.pi) ** 1.0, rel=1e-12)
    g3 = make_grid(3, 16, 2 * np.pi)
    f3 = mode_field(g3, (1, 2, 0))
    assert lp_norm(f3, 2) == pytest.approx((2 * np.pi) ** 1.5, rel=1e-12)


def test_lp_norm_zero_field(grid64):
    for p in (1, 2, np.inf):
        assert lp_norm(zero_field(grid64), p) == 0.0


def test_lp_norm_parseval_consistency(grid64):
    f = random_scalar_field(grid64, 5, band=25)
    n2 = lp_norm(f, 2)
    freq_side = np.sum(np.abs(f.coef) ** 2) * (2 * np.pi) ** 2
    assert abs(n2 ** 2 - freq_side) / n2 ** 2 < 1e-10


def test_lp_norm_rejects_bad_p(grid64):
    with pytest.raises(ValueError):
        lp_norm(zero_field(grid64), 0.5)


def test_symmetrize_and_asymmetry(grid64):
    rng = np.random.default_rng(6)
    coef = rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64))
    f = field_from_coef(grid64, coef)
    fs = symmetrize_real(f)
    assert conj_asymmetry(fs) < 1e-14
    assert np.max(np.abs(to_physical(fs).imag)) < 1e-12


def test_half_nyquist_guard(grid64):
    ok = random_scalar_field(grid64, 7, band=15)  # limit for n=64
    require_half_nyquist(ok)
    bad = mode_field(grid64, (16, 0))
    assert band_limit_chebyshev(bad) == 16
    with pytest.raises(AliasingError):
        require_half_nyquist(bad)


def test_band_limit_ball(grid64):
    f = random_scalar_field(grid64, 8, band=30)
    cut = band_limit_ball(f, 10.0)
    radii = np.sqrt(sum(k.astype(float) ** 2 for k in grid64.k_components()))
    assert np.all(cut.coef[0][radii > 10.0] == 0)


def test_field_io_roundtrip(tmp_path, grid16_3d):
    v = random_divfree_field(grid16_3d, 9, band=5)
    path = tmp_path / "field.fld"
    save_field(v, path)
    back = load_field(path)
    assert back.grid == v.grid
    assert back.tag == v.tag
    assert np.array_equal(back.coef, v.coef)


def test_field_io_rejects_garbage(tmp_path):
    path = tmp_path / "junk.fld"
    path.write_bytes(b"not a field at all")
    with pytest.raises(ValueError):
        load_field(path)
