import numpy as np
import pytest

from srchoquard import diagnostics as dg
from srchoquard import spectral as sp
from srchoquard import solver as so
from srchoquard.errors import UsageError
from srchoquard.model import ModelParams, Problem
from srchoquard.nonlinearity import NonlinearitySpec
from srchoquard.riesz import RieszPlan

NL = NonlinearitySpec("power", 3.0, 2.5)


@pytest.fixture(scope="module")
def grid():
    return sp.Grid(2, 64, 16.0)


def test_single_part_zero(grid):
    bump = so.gaussian(grid, 0.5)
    rep = dg.brezis_lieb_d([bump], [2.0, 4.0], RieszPlan(grid, 1.5), NL)
    assert rep.cross_terms == [0.0, 0.0]
    prob = Problem.build(grid, ModelParams(2, 1.0, 0.0, 1.5, 3.0, 2.5), NL)
    assert max(dg.energy_split(prob, [bump], [2.0, 4.0]).energy_defects) == 0.0


def test_disjoint_support_truncated_kernel(grid):
    rho = 0.8
    bump = np.clip(1 - grid.radius ** 2 / rho ** 2, 0, None) ** 2
    R = 4.0
    rep = dg.brezis_lieb_d([bump, bump], [R], RieszPlan(grid, 1.5, cutoff=R / 2), NL)
    assert rep.cross_terms[0] <= 1e-13


def test_overlap_and_spread_rejected(grid):
    bump = so.gaussian(grid, 1.0)
    with pytest.raises(UsageError, match="overlap"):
        dg.brezis_lieb_d([bump, bump], [0.5], RieszPlan(grid, 1.5), NL)
    with pytest.raises(UsageError):
        dg.brezis_lieb_d([bump, bump], [9.0], RieszPlan(grid, 1.5), NL)


def test_energy_split_reconciles(grid):
    prob = Problem.build(grid, ModelParams(2, 1.0, 0.0, 1.5, 3.0, 2.5), NL, k="const:0.3")
    bump = so.gaussian(grid, 0.5)
    rep = dg.energy_split(prob, [bump, bump], [2.0, 4.0, 8.0])
    assert all(b < a for a, b in zip(rep.energy_defects, rep.energy_defects[1:]))
    for d, p in zip(rep.energy_defects, rep.predicted_defects):
        assert d == pytest.approx(p, abs=1e-8)


def test_split_csv(grid, tmp_path):
    bump = so.gaussian(grid, 0.5)
    rep = dg.brezis_lieb_d([bump, bump], [2.0, 4.0], RieszPlan(grid, 1.5), NL)
    path = tmp_path / "s.csv"
    dg.write_split_csv(path, rep)
    lines = path.read_text().splitlines()
    assert lines[0] == dg.SPLIT_CSV_HEADER and len(lines) == 3
