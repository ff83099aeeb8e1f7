import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbspaces import gabor as gb
from bbspaces import signal as sg
from bbspaces import wilson as wl
from bbspaces.errors import ValidationError


def rand_wilson(rng, K, M):
    e = rng.standard_normal((2 * K + 1, M + 1)) + 1j * rng.standard_normal((2 * K + 1, M + 1))
    return wl.WilsonCoefficients(K, M, e)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 6), st.integers(0, 6))
def test_phi1_phi2_identity(seed, K, M):
    c = rand_wilson(np.random.default_rng(seed), K, M)
    back = wl.phi1(wl.phi2(c), K, M)
    # the n = 0 column is pure index bookkeeping; the others pass through
    # two factors of 1/sqrt(2), so equality holds up to rounding
    assert np.array_equal(back.entries[:, 0], c.entries[:, 0])
    err = np.abs(back.entries - c.entries)
    assert np.all(err <= 4 * np.finfo(float).eps * np.abs(c.entries))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 6), st.integers(0, 6))
def test_phi_bijection(seed, K, M):
    c = rand_wilson(np.random.default_rng(seed), K, M)
    d = wl.phi(c)
    assert np.array_equal(wl.phi_inverse(d).entries, c.entries)
    assert sorted(map(complex, d.entries.ravel()), key=lambda z: (z.real, z.imag)) == \
        sorted(map(complex, c.entries.ravel()), key=lambda z: (z.real, z.imag))


def test_phi_row_order():
    K = 3
    c = wl.WilsonCoefficients(K, 0, np.arange(-K, K + 1)[:, None])
    assert wl.phi(c).entries[:, 0].real.tolist() == [0, 1, -1, 2, -2, 3, -3]


def test_phi1_rejects_small_box():
    c = gb.GaborCoefficients(gb.LatticeSpec(0.5, 1.0, 3, 2), np.zeros((7, 5)))
    with pytest.raises(ValidationError):
        wl.phi1(c, 2, 2)


def test_coefficient_shapes():
    with pytest.raises(ValidationError):
        wl.WilsonCoefficients(2, 2, np.zeros((4, 3)))
    c = wl.WilsonCoefficients.delta(2, 3, -1, 2)
    assert c[-1, 2] == 1 and c.entries.sum() == 1
    with pytest.raises(IndexError):
        c[3, 0]


def test_atom_formula(grid32):
    psi = sg.gaussian(grid32)
    x = grid32.x
    g = lambda t: 2 ** 0.25 * np.exp(-np.pi * t ** 2)
    assert np.abs(wl.wilson_atom(psi, 3, 0).values - g(x - 3)).max() < 1e-12
    # k + n odd: the sine atom
    ref = np.sqrt(2) * 1j * np.sin(2 * np.pi * 2 * x) * g(x - 0.5)
    assert np.abs(wl.wilson_atom(psi, 1, 2).values - ref).max() < 1e-12
    ref = np.sqrt(2) * np.cos(2 * np.pi * 2 * x) * g(x + 1)
    assert np.abs(wl.wilson_atom(psi, -2, 2).values - ref).max() < 1e-12


def test_synthesis_of_delta_is_atom(grid32):
    psi = sg.gaussian(grid32)
    for k, n in [(0, 0), (3, 0), (-2, 1), (1, 4)]:
        f = wl.wilson_synthesize(psi, wl.WilsonCoefficients.delta(4, 4, k, n))
        assert (f - wl.wilson_atom(psi, k, n)).norm() < 1e-12


def test_analysis_matches_inner_products(grid32):
    psi = sg.gaussian(grid32)
    f = sg.hermite(3, grid32)
    c = wl.wilson_analyze(psi, f, 3, 4)
    for k in range(-3, 4):
        for n in range(5):
            assert abs(c[k, n] - f.inner(wl.wilson_atom(psi, k, n))) < 1e-12


def test_window_shape(wilson_window):
    psi, info = wilson_window
    assert abs(psi.norm() - 1) < 1e-8
    assert np.abs(psi.values - psi.reflect().values).max() < 1e-14
    assert np.all(np.isreal(psi.values))
    assert psi.boundary_magnitude() < 1e-14


def test_window_frame_bound_two(wilson_window, grid32):
    psi, _ = wilson_window
    A, B = gb.frame_bounds(psi, wl.wilson_window_lattice(grid32))
    assert abs(A - 2) < 1e-6 and abs(B - 2) < 1e-6


def test_gram(wilson_window):
    psi, _ = wilson_window
    assert wl.gram_defect(psi, 12, 24) < 1e-6


def test_parseval(wilson_window, corpus32):
    psi, _ = wilson_window
    for f in corpus32:
        c = wl.wilson_analyze(psi, f, 24, 24)
        assert abs(np.sum(np.abs(c.entries) ** 2) - f.norm() ** 2) < 1e-7


def test_sequence_rep_round_trip(wilson_window, corpus32):
    psi, _ = wilson_window
    for f in corpus32:
        back = wl.sequence_rep_inverse(psi, wl.sequence_rep(psi, f, 24, 24))
        assert (back - f).norm() / f.norm() < 1e-8


def test_gaussian_window_is_not_orthonormal(grid32):
    assert wl.gram_defect(sg.gaussian(grid32), 2, 2) > 0.1
