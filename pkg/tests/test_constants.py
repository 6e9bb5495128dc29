import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from srchoquard import constants as cst
from srchoquard.errors import DomainError, NumericError


def test_gamma_values():
    assert cst.gamma(1.0) == 1.0
    assert cst.gamma(-0.5) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-15)
    assert cst.gamma(0.25) == pytest.approx(float(mpmath.gamma(mpmath.mpf(1) / 4)), rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, -7.0])
def test_gamma_pole_is_named(x):
    with pytest.raises(DomainError, match="pole"):
        cst.gamma(x)


@given(st.floats(0.05, 30.0))
def test_gamma_matches_mpmath(x):
    assert cst.gamma(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-13)


def test_c_n_half_examples():
    assert cst.c_n_half(2) == pytest.approx(1 / (2 * math.pi), rel=1e-15)
    assert cst.c_n_half(3) == pytest.approx(1 / math.pi ** 2, rel=1e-15)
    assert cst.c_n_half(5) == pytest.approx(2 / math.pi ** 3, rel=1e-15)
    with pytest.raises(DomainError):
        cst.c_n_half(1)


@pytest.mark.parametrize("N", range(2, 7))
def test_verify_c_n_half(N):
    rep = cst.verify_c_n_half(N)
    assert rep.rel_error <= 1e-8
    if N == 2:
        assert rep.quadrature_value == pytest.approx(2 * math.pi, rel=1e-10)
    if N == 3:
        assert rep.quadrature_value == pytest.approx(math.pi ** 2, rel=1e-8)


def test_verify_budget_exceeded():
    with pytest.raises(NumericError) as exc:
        cst.verify_c_n_half(2, tol=1e-30)
    assert exc.value.estimate is not None


def test_hardy_sharp():
    assert cst.hardy_sharp(3) == pytest.approx(4 * math.pi, rel=1e-14)
    g = cst.gamma
    ref = 2 * math.pi * g(0.75) ** 2 * 2 * math.sqrt(math.pi) / (g(0.25) ** 2 * g(1.5))
    assert cst.hardy_sharp(2) == pytest.approx(ref, rel=1e-14)
    with pytest.raises(DomainError):
        cst.hardy_sharp(1)


def test_mu_star():
    assert cst.mu_star(2) == pytest.approx(4 * math.pi ** 2 / cst.gamma(0.25) ** 4, rel=1e-15)
    assert round(cst.mu_star(2), 5) == 0.22847
    assert cst.mu_star(3) == pytest.approx(2 / math.pi, abs=1e-12)
    for N in range(2, 11):
        assert cst.mu_star(N) == pytest.approx(0.5 * cst.hardy_sharp(N) * cst.c_n_half(N), rel=1e-12)


@given(st.integers(2, 10), st.floats(0.0, 3.0))
def test_lower_constant_sign(N, frac):
    mu = frac * cst.mu_star(N)
    val = cst.q_mu_lower_constant(N, mu)
    if frac < 1 - 1e-9:
        assert val > 0
    elif frac > 1 + 1e-9:
        assert val < 0


def test_constants_table_rows():
    rows = cst.constants_table(2, 4, verify=True)
    assert [r[0] for r in rows] == [2, 3, 4]
    assert all(r[-1] <= 1e-8 for r in rows)
