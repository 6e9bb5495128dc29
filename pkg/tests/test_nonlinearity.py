import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from srchoquard import nonlinearity as nlm
from srchoquard.errors import DomainError
from srchoquard.nonlinearity import NonlinearitySpec

FAMILIES = ("power", "log_power", "piecewise_sublinear")
finite = st.floats(-50.0, 50.0, allow_nan=False)


@pytest.mark.parametrize("kind", FAMILIES)
@given(u=finite)
def test_F_is_antiderivative(kind, u):
    spec = NonlinearitySpec(kind, 3.0, 2.5)
    assert spec.F(np.array(u)) == pytest.approx(nlm.quadrature_F(spec, u), rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("kind", FAMILIES)
@given(u=finite)
def test_f_odd_F_even_nonneg(kind, u):
    spec = NonlinearitySpec(kind, 3.0, 2.5)
    a = np.array([u, -u])
    assert spec.f(a)[0] == -spec.f(a)[1]
    assert spec.F(a)[0] == spec.F(a)[1] >= 0


@pytest.mark.parametrize("kind", FAMILIES)
def test_non_finite_is_domain_error(kind):
    with pytest.raises(DomainError):
        NonlinearitySpec(kind, 3.0, 2.5).f(np.array([1.0, np.nan]))


def test_f_power_example():
    spec = NonlinearitySpec("power", 3.0, 2.5)
    assert spec.f(np.array(2.0)) == pytest.approx(4.0)
    assert spec.F(np.array(2.0)) == pytest.approx(8.0 / 3.0)


@pytest.mark.parametrize("kind", FAMILIES)
def test_check_all_passes(kind):
    reps = nlm.check_all(NonlinearitySpec(kind, 3.0, 2.5), 1.5, 2)
    assert [r.name for r in reps if not r.passed] == []


def test_piecewise_breakpoints_sampled():
    spec = NonlinearitySpec("piecewise_sublinear", 3.0, 2.5, m_break=2.0)
    s = nlm.sample_points(spec=spec)
    for b in (1.0, 2.0):
        assert np.min(np.abs(np.abs(s) - b)) < 1e-9
    assert nlm.check_f4(spec, s).passed


def test_linear_control_fails_f2():
    spec = NonlinearitySpec("linear", 3.0, 2.5)
    assert not nlm.check_f2(spec, nlm.sample_points()).passed


def test_arq_log_power_and_zero():
    spec = NonlinearitySpec("log_power", 3.0, 2.2)
    assert nlm.check_arq(spec, nlm.sample_points(1e-3, 1e3)).passed
    assert nlm.check_arq(spec, np.array([0.0])).passed


def test_feps_monotone_and_finite():
    spec = NonlinearitySpec("log_power", 3.0, 2.5)
    s = nlm.sample_points()
    vals = [nlm.feps_constants(spec, e, s) for e in (0.01, 0.1, 1.0, 10.0)]
    assert all(math.isfinite(v) for v in vals)
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_weight_scales_log_power():
    spec = NonlinearitySpec("log_power", 3.0, 2.5)
    u = np.linspace(-3, 3, 11)
    assert np.allclose(spec.with_weight(2.0).F(u), 2.0 * spec.F(u))
