import math

import numpy as np

from lplab import profiles


def central_difference(fn, t, order, h):
    ks = np.arange(order + 1)
    coeffs = (-1.0) ** ks * np.array([math.comb(order, k) for k in ks])
    offsets = order / 2.0 - ks
    vals = sum(c * fn(t + o * h) for c, o in zip(coeffs, offsets))
    return vals / h ** order


def test_smoothstep_plateaus_exact():
    t = np.array([-1.0, 0.0, 1.0, 2.0])
    assert np.array_equal(profiles.smoothstep(t), [0.0, 0.0, 1.0, 1.0])


def test_smoothstep_complement_identity():
    t = np.linspace(0.01, 0.99, 57)
    s = profiles.smoothstep(t) + profiles.smoothstep(1.0 - t)
    assert np.max(np.abs(s - 1.0)) < 1e-15


def test_smoothstep_monotone():
    t = np.linspace(-0.2, 1.2, 400)
    s = profiles.smoothstep(t)
    assert np.all(np.diff(s) >= 0)


def test_jet_value_matches_cheap_path():
    t = np.linspace(-0.5, 1.5, 101)
    jet = profiles.smoothstep_jet(t)
    assert np.max(np.abs(jet[0] - profiles.smoothstep(t))) < 1e-15


def test_jet_first_two_derivatives_match_fd():
    t = np.array([0.15, 0.3, 0.5, 0.72, 0.9])
    jet = profiles.smoothstep_jet(t)
    fd1 = central_difference(profiles.smoothstep, t, 1, 1e-6)
    fd2 = central_difference(profiles.smoothstep, t, 2, 1e-5)
    assert np.max(np.abs(jet[1] - fd1) / (1 + np.abs(fd1))) < 1e-7
    assert np.max(np.abs(jet[2] - fd2) / (1 + np.abs(fd2))) < 1e-5


def test_jet_higher_derivatives_match_richardson_fd():
    # high-order central differences are noisy; Richardson in h sharpens them
    t = np.array([0.3, 0.62, 0.85])
    jet = profiles.smoothstep_jet(t)
    for order, h, tol in [(3, 2e-3, 1e-3), (4, 2e-2, 5e-2)]:
        a = central_difference(profiles.smoothstep, t, order, 2 * h)
        b = central_difference(profiles.smoothstep, t, order, h)
        rich = (4 ** 1 * b - a) / (4 - 1)
        scale = 1 + np.abs(rich)
        assert np.max(np.abs(jet[order] - rich) / scale) < tol


def test_jet_vanishes_outside_transition():
    t = np.array([-0.3, 0.0, 1.0, 1.7])
    jet = profiles.smoothstep_jet(t)
    assert np.array_equal(jet[1:], np.zeros_like(jet[1:]))


def test_steps_hit_bounds_exactly():
    assert profiles.up_step(0.5, 1.0, 2.0) == 0.0
    assert profiles.up_step(2.5, 1.0, 2.0) == 1.0
    assert profiles.down_step(0.5, 1.0, 2.0) == 1.0
    assert profiles.down_step(2.5, 1.0, 2.0) == 0.0


def test_step_jets_respect_chain_rule():
    r = np.array([1.3, 1.7])
    jet_up = profiles.up_step_jet(r, 1.0, 2.0)
    base = profiles.smoothstep_jet(r - 1.0)
    assert np.allclose(jet_up, base, rtol=0, atol=1e-14)
    jet_down = profiles.down_step_jet(r, 1.0, 2.0)
    flipped = profiles.smoothstep_jet(2.0 - r)
    signs = np.array([(-1.0) ** n for n in range(5)])[:, None]
    assert np.allclose(jet_down, flipped * signs, rtol=0, atol=1e-14)
