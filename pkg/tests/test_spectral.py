import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles as orc
from srchoquard import spectral as sp
from srchoquard.errors import NumericError, UsageError


def test_constant_field_is_dc_only():
    g = sp.Grid(2, 16, 4.0)
    c = sp.forward_transform(g, np.full(g.shape, 3.0))
    nz = np.argwhere(np.abs(c) > 1e-12 * np.abs(c).max())
    assert nz.tolist() == [[0, 0]]


def test_single_mode_has_two_coefficients():
    g = sp.Grid(2, 16, 4.0)
    u = np.cos(2 * np.pi * g.coords[0] / g.box_length)
    c = sp.forward_transform(g, u)
    nz = {tuple(i) for i in np.argwhere(np.abs(c) > 1e-10 * np.abs(c).max())}
    assert nz == {(1, 0), (15, 0)}
    assert abs(c[1, 0]) == pytest.approx(abs(c[15, 0]))


@settings(max_examples=20)
@given(st.integers(0, 2 ** 31), st.sampled_from([(1, 32), (2, 16), (3, 8)]))
def test_round_trip(seed, shape):
    N, M = shape
    g = sp.Grid(N, M, 6.0)
    u = np.random.default_rng(seed).standard_normal(g.shape)
    back = sp.inverse_transform(g, sp.forward_transform(g, u))
    assert np.max(np.abs(back - u)) <= 1e-12 * np.max(np.abs(u))


def test_imaginary_residue_raises():
    g = sp.Grid(2, 8, 4.0)
    c = sp.forward_transform(g, np.ones(g.shape))
    c[1, 0] += 1.0  # breaks Hermitian symmetry
    with pytest.raises(NumericError):
        sp.inverse_transform(g, c)


def test_sqrt_lap_examples():
    g = sp.Grid(2, 16, 5.0)
    assert np.allclose(sp.apply_sqrt_lap(g, np.full(g.shape, 1.5), 2.0), 3.0, atol=1e-13)
    u = np.cos(2 * np.pi * g.coords[0] / g.box_length)
    assert np.allclose(sp.apply_sqrt_lap(g, u, 0.0), 2 * np.pi / g.box_length * u, atol=1e-13)


def test_kinetic_examples():
    g = sp.Grid(2, 16, 5.0)
    assert sp.kinetic_quadratic(g, np.zeros(g.shape), 1.0) == 0.0
    assert sp.kinetic_quadratic(g, np.full(g.shape, 2.0), 1.5) == pytest.approx(1.5 * 4 * 25, rel=1e-13)
    g = sp.Grid(2, 64, 20.0)
    u = np.exp(-g.radius ** 2 / 2)
    assert sp.kinetic_quadratic(g, u, 1.0) == pytest.approx(orc.gaussian_kinetic_2d(1.0, 1.0), rel=1e-3)


def test_gagliardo_examples(rng):
    g = sp.Grid(2, 32, 8.0)
    assert sp.gagliardo_sq(g, np.zeros(g.shape)) == 0.0
    u = sp.band_limited_random(g, rng, 3.0)
    assert sp.gagliardo_sq(g, 3 * u) == pytest.approx(9 * sp.gagliardo_sq(g, u), rel=1e-12)
    # |xi| has a cone point at 0, so the frequency sum converges like (2 pi / L)^3
    ref = orc.gaussian_gagliardo_2d(1.0)
    errs = []
    for L in (20.0, 40.0):
        g = sp.Grid(2, int(3.2 * L), L)
        errs.append(abs(sp.gagliardo_sq(g, np.exp(-g.radius ** 2 / 2)) - ref) / ref)
    assert errs[1] < 1e-3
    assert math.log2(errs[0] / errs[1]) == pytest.approx(3.0, abs=0.2)


def test_lp_norm_and_grid_mismatch():
    g = sp.Grid(2, 16, 3.0)
    assert sp.lp_norm(g, np.ones(g.shape), 2.0) == pytest.approx(3.0, rel=1e-14)
    with pytest.raises(UsageError):
        sp.lp_norm(g, np.ones((8, 8)), 2.0)


def test_shift_by_grid_step_is_roll(rng):
    g = sp.Grid(2, 32, 8.0)
    u = sp.band_limited_random(g, rng, 3.0)
    z = np.array([3 * g.spacing, -g.spacing])
    assert np.allclose(sp.shift(g, u, z), np.roll(u, (3, -1), axis=(0, 1)), atol=1e-12)


def test_symmetry_defect_of_radial_field():
    g = sp.Grid(2, 32, 8.0)
    u = np.exp(-g.radius ** 2)
    assert sp.symmetry_defect(g, u) <= 1e-14
    assert sp.symmetry_defect(g, u * (1 + 0.1 * g.coords[0])) > 1e-3


@pytest.mark.parametrize("N", [1, 2, 3])
def test_field_format_round_trip(N, rng, tmp_path):
    g = sp.Grid(N, 8, 2.5)
    u = rng.standard_normal(g.shape)
    path = tmp_path / "f.srcq"
    sp.write_field(path, g, u)
    g2, u2 = sp.read_field(path)
    assert (g2.dim, g2.points, g2.box_length) == (g.dim, g.points, g.box_length)
    assert u2.tobytes() == u.tobytes()
    buf = io.BytesIO()
    sp.write_field(buf, g, u)
    assert buf.getvalue() == path.read_bytes()
