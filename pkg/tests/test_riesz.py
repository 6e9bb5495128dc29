import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from srchoquard import spectral as sp
from srchoquard.errors import DomainError
from srchoquard.nonlinearity import NonlinearitySpec
from srchoquard.riesz import RieszPlan, dd_derivative, dd_gradient, dd_value, hls_growth_probe

NL = NonlinearitySpec("power", 3.0, 2.5)


def test_zero_inputs():
    g = sp.Grid(2, 16, 6.0)
    plan = RieszPlan(g, 1.5)
    z = np.zeros(g.shape)
    assert np.all(plan.convolve(z) == 0)
    assert dd_value(plan, z, NL) == 0
    assert dd_derivative(plan, z, NL, np.ones(g.shape)) == 0


@pytest.mark.parametrize("alpha", [0.0, 2.0, -1.0])
def test_alpha_out_of_range(alpha):
    with pytest.raises(DomainError):
        RieszPlan(sp.Grid(2, 8, 4.0), alpha)


@settings(max_examples=10)
@given(st.integers(0, 2 ** 31))
def test_two_paths_agree(seed):
    g = sp.Grid(2, 16, 6.0)
    u = np.random.default_rng(seed).standard_normal(g.shape)
    a = RieszPlan(g, 1.5).convolve(u)
    b = RieszPlan(g, 1.5, "direct").convolve(u)
    assert np.max(np.abs(a - b)) <= 1e-10 * np.max(np.abs(b))


def test_kernel_is_positive_and_even():
    g = sp.Grid(2, 16, 6.0)
    k = RieszPlan(g, 1.5).kernel
    assert np.all(k >= 0)
    assert np.allclose(k, np.roll(k[::-1, ::-1], 1, axis=(0, 1)))


def test_gradient_matches_derivative(rng):
    g = sp.Grid(2, 32, 8.0)
    plan = RieszPlan(g, 1.5)
    u = sp.band_limited_random(g, rng, 3.0)
    phi = sp.band_limited_random(g, rng, 3.0)
    lhs = sp.l2_inner(g, dd_gradient(plan, u, NL), phi)
    assert lhs == pytest.approx(dd_derivative(plan, u, NL, phi), rel=1e-12)
    eps = 1e-5
    fd = (dd_value(plan, u + eps * phi, NL) - dd_value(plan, u - eps * phi, NL)) / (2 * eps)
    assert fd == pytest.approx(dd_derivative(plan, u, NL, phi), rel=1e-7)


def test_growth_probe(rng):
    g = sp.Grid(2, 32, 8.0)
    plan = RieszPlan(g, 1.5)
    u = sp.band_limited_random(g, rng, 3.0)
    for kind in ("power", "log_power", "piecewise_sublinear"):
        rep = hls_growth_probe(plan, NonlinearitySpec(kind, 3.0, 2.5), u, np.logspace(-4, 4, 9))
        assert rep.passed, (kind, rep)
    assert hls_growth_probe(plan, NL, np.zeros(g.shape), [1, 2]).degenerate
