import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles as orc
from conftest import reference_problem
from srchoquard import energy as en
from srchoquard import nehari as nh
from srchoquard import spectral as sp
from srchoquard.errors import ProjectionError, UsageError
from srchoquard.riesz import dd_value


def test_zero_residual_and_usage(small_problem):
    z = np.zeros(small_problem.grid.shape)
    assert nh.nehari_residual(small_problem, z) == 0
    with pytest.raises(UsageError):
        nh.project(small_problem, z)


@settings(max_examples=20)
@given(st.integers(0, 2 ** 31), st.floats(0.05, 20.0))
def test_projection_postconditions(small_problem, seed, amp):
    r = np.random.default_rng(seed)
    u = amp * sp.band_limited_random(small_problem.grid, r, 3.0)
    fib = nh.project(small_problem, u)
    v = fib.t_star * u
    assert abs(nh.nehari_residual(small_problem, v)) <= 1e-8 * en.q_mu_form(small_problem, v)
    again = nh.project(small_problem, v)
    assert again.t_star == pytest.approx(1.0, abs=1e-9)
    assert nh.in1_margin(small_problem, v) > 0


def test_closed_form(rng):
    prob = reference_problem(points=32)
    u = sp.band_limited_random(prob.grid, rng, 3.0)
    ref = orc.pure_power_t_star(en.q_mu_form(prob, u), dd_value(prob.plan, u, prob.nl), 3.0)
    assert nh.project(prob, u).t_star == pytest.approx(ref, rel=1e-10)


def test_small_t_limit(small_problem, rng):
    u = sp.band_limited_random(small_problem.grid, rng, 3.0)
    t = 1e-4
    assert en.energy(small_problem, t * u).total / t ** 2 == pytest.approx(0.5 * en.q_mu_form(small_problem, u), rel=1e-3)


def test_scan_single_sign_change(small_problem, rng):
    u = sp.band_limited_random(small_problem.grid, rng, 3.0)
    rows = nh.fibering_scan(small_problem, u, np.geomspace(1e-3, 1e3, 61))
    assert nh.sign_changes([r[2] for r in rows]) == 1
    assert rows[0][2] > 0 > rows[-1][2]
    with pytest.raises(UsageError):
        nh.fibering_scan(small_problem, u, [1.0, 0.5])


def test_projection_failure_code(small_problem, rng):
    u = 1e-3 * sp.band_limited_random(small_problem.grid, rng, 3.0)
    with pytest.raises(ProjectionError) as exc:
        nh.project(small_problem, u, t_max=2.0)
    assert exc.value.code == "no-sign-change"


def test_fibering_csv(small_problem, rng, tmp_path):
    u = sp.band_limited_random(small_problem.grid, rng, 3.0)
    path = tmp_path / "fib.csv"
    nh.write_fibering_csv(path, nh.fibering_scan(small_problem, u, [0.5, 1.0, 2.0]))
    lines = path.read_text().splitlines()
    assert lines[0] == "t,energy,dphi" and len(lines) == 4
