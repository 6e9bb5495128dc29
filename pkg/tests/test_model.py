import numpy as np
import pytest

from srchoquard import spectral as sp
from srchoquard.errors import ConstraintError, UsageError
from srchoquard.model import (ModelParams, Problem, build_potentials, check_a1, check_a2,
                              coulomb_samples, parse_potential, validate)
from srchoquard.nonlinearity import NonlinearitySpec


def failed(params, **kw):
    return [c.name for c in validate(params, **kw).failures]


def test_reference_params_pass():
    assert failed(ModelParams(2, 1.0, 0.0, 1.5, 3.0, 2.5)) == []


def test_upper_alpha_bound_named():
    assert "(N): (N-1)p-N < alpha" in failed(ModelParams(3, 1.0, 0.0, 2.0, 3.0, 2.5))


def test_strict_alpha_boundary():
    assert "(N): (N-1)p-N < alpha" in failed(ModelParams(3, 1.0, 0.0, 2.0, 2.5, 2.2))
    assert "(N): (N-1)p-N < alpha" not in failed(ModelParams(3, 1.0, 0.0, 2.2, 2.5, 2.2))


def test_q_boundary():
    assert "(N): 2 < q" in failed(ModelParams(2, 1.0, 0.0, 1.5, 3.0, 2.0))


def test_all_failures_reported_at_once():
    names = failed(ModelParams(3, -1.0, 0.0, 3.5, 3.0, 2.0))
    assert {"(N): alpha < N", "(N): 2 < q", "m > 0"} <= set(names)


def test_mu_flag():
    assert validate(ModelParams(3, 1.0, 0.7, 2.5, 2.5, 2.2)).mu_below_mu_star is False
    assert validate(ModelParams(3, 1.0, 0.5, 2.5, 2.5, 2.2)).mu_below_mu_star is True


def test_a_conditions():
    g = sp.Grid(2, 32, 8.0)
    zero = build_potentials(g, 2.0, 0.0, 0.0)
    assert check_a1(ModelParams(2, 1.0, 0.1, 1.5, 3.0, 2.5), g, zero)
    assert check_a2(ModelParams(2, 1.0, -0.1, 1.5, 3.0, 2.5), g, zero)
    with pytest.raises(UsageError):
        check_a1(ModelParams(2, 1.0, 0.0, 1.5, 3.0, 2.5), g, zero)
    neg = build_potentials(g, 2.0, "exp:-1:1", 0.0)
    assert check_a1(ModelParams(2, 1.0, 0.1, 1.5, 3.0, 2.5), g, neg)
    assert not check_a2(ModelParams(2, 1.0, -0.1, 1.5, 3.0, 2.5), g, neg)
    bump = build_potentials(g, 2.0, "gauss:5:1", 0.0)
    res = check_a1(ModelParams(2, 1.0, 0.1, 1.5, 3.0, 2.5), g, bump)
    assert not res and res.node is not None
    assert bump.v_local[res.node] >= 0.1 / g.radius[res.node]


def test_potential_checks():
    g = sp.Grid(2, 32, 8.0)
    pots = build_potentials(g, lambda x: 2 + 0.5 * np.sin(2 * np.pi * x[0]), 0.0, 0.0)
    assert pots.periodic_check is True
    rep = validate(ModelParams(2, 1.0, 0.0, 1.5, 3.0, 2.5), pots, grid=g)
    assert rep.ok
    aperiodic = build_potentials(g, lambda x: 2 + 0.5 * np.sin(2.3 * x[0]), 0.0, 0.0)
    assert aperiodic.periodic_check is False
    with pytest.raises(ConstraintError):
        build_potentials(g, 2.0, 0.0, -1.0)
    low = build_potentials(g, 0.8, 0.0, 0.0)
    assert "(V2): essinf V > m" in failed(ModelParams(2, 1.0, 0.0, 1.5, 3.0, 2.5), potentials=low, grid=g)


def test_local_decay_check():
    g = sp.Grid(2, 32, 8.0)
    wide = build_potentials(g, 2.0, "const:0.5", 0.0)
    assert "(V1): V_l decays at the box boundary" in failed(
        ModelParams(2, 1.0, 0.1, 1.5, 3.0, 2.5), potentials=wide, grid=g)


@pytest.mark.parametrize("text", ["nope", "const", "cos:1", "gauss:a:b"])
def test_bad_potential_text(text):
    with pytest.raises(UsageError):
        parse_potential(text)


def test_coulomb_modes():
    g = sp.Grid(2, 32, 8.0)
    pw, cell = coulomb_samples(g, "pointwise"), coulomb_samples(g, "cell")
    assert np.all(np.isfinite(cell)) and np.all(cell > 0)
    far = g.radius > 2.0
    assert np.allclose(pw[far], cell[far], rtol=1e-3)
    exact = 8 * 4.0 * np.arcsinh(1.0)  # int over [-a, a]^2 of 1/|x|, a = L/2
    assert np.sum(cell) * g.cell_volume == pytest.approx(exact, rel=1e-8)
    assert np.sum(cell) > np.sum(pw)  # Jensen: 1/|x| is convex


def test_problem_build_aggregates():
    g = sp.Grid(2, 16, 8.0)
    with pytest.raises(ConstraintError, match="2 < q"):
        Problem.build(g, ModelParams(2, 1.0, 0.0, 1.5, 3.0, 2.0), NonlinearitySpec("power", 3.0, 2.0))
    with pytest.raises(UsageError):
        Problem.build(g, ModelParams(3, 1.0, 0.0, 1.5, 3.0, 2.5), NonlinearitySpec("power", 3.0, 2.5))
