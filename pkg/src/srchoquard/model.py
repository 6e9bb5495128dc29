"""Problem data (parameters with sampled potentials) and hypothesis validation."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .constants import mu_star
from .errors import ConstraintError, UsageError
from .nonlinearity import NonlinearitySpec
from .riesz import RieszPlan
from .spectral import Grid


@dataclass(frozen=True)
class ModelParams:
    dim: int
    mass: float
    mu: float
    alpha: float
    p: float
    q: float


@dataclass
class Check:
    name: str
    passed: bool
    message: str = ""


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)
    mu_below_mu_star: Optional[bool] = None
    mu_star: Optional[float] = None

    def add(self, name, passed, message=""):
        self.checks.append(Check(name, bool(passed), message))

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def format(self):
        lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}  {c.message}" for c in self.checks]
        if self.mu_star is not None:
            lines.append(f"INFO mu < mu*(N) = {self.mu_star:.10g}: {self.mu_below_mu_star}")
        return "\n".join(lines)


@dataclass(frozen=True, eq=False)
class PotentialSet:
    v_periodic: np.ndarray
    v_local: np.ndarray
    k_weight: np.ndarray
    coulomb: np.ndarray
    periodic_check: Optional[bool] = None

    @property
    def v_total(self):
        return self.v_periodic + self.v_local


def validate(params: ModelParams, potentials: PotentialSet = None, boundary_eps: float = 1e-3,
             grid: Grid = None, require_v2: bool = True) -> ValidationReport:
    """Pass/fail per standing hypothesis; never raises."""
    N, p, q, a, m = params.dim, params.p, params.q, params.alpha, params.mass
    r = ValidationReport()
    r.add("(N): N >= 2", N >= 2 and int(N) == N, f"N = {N}")
    r.add("(N): (N-1)p-N < alpha", (N - 1) * p - N < a, f"(N-1)p-N = {(N - 1) * p - N:g}, alpha = {a:g}")
    r.add("(N): alpha < N", a < N, f"alpha = {a:g}, N = {N}")
    r.add("(N): 2 < q", 2 < q, f"q = {q:g}")
    r.add("(N): q < 2p", q < 2 * p, f"q = {q:g}, 2p = {2 * p:g}")
    qmax = 2 * N / (N - 1) if N > 1 else math.inf
    r.add("(N): q < 2N/(N-1)", q < qmax, f"q = {q:g}, 2N/(N-1) = {qmax:g}")
    r.add("(N): p > 2", p > 2, f"p = {p:g}")
    r.add("m > 0", m > 0, f"m = {m:g}")
    if N >= 2 and int(N) == N:
        r.mu_star = mu_star(int(N))
        r.mu_below_mu_star = params.mu < r.mu_star
    if potentials is not None:
        kmin = float(np.min(potentials.k_weight))
        r.add("(K): K >= 0", kmin >= 0, f"min K = {kmin:g}")
        vmin = float(np.min(potentials.v_total))
        if require_v2:
            r.add("(V2): essinf V > m", vmin > m, f"min V = {vmin:g}, m = {m:g}")
        else:
            vpmin = float(np.min(potentials.v_periodic))
            r.add("(V2'): essinf V_p > m", vpmin > m, f"min V_p = {vpmin:g}, m = {m:g}")
        c = potentials.coulomb
        r.add("coulomb finite and positive", bool(np.all(np.isfinite(c)) and np.all(c > 0)))
        if potentials.periodic_check is not None:
            r.add("(V1): V_p periodic on the grid", potentials.periodic_check)
        if grid is not None:
            ring = boundary_ring(grid)
            vb = float(np.max(np.abs(potentials.v_local[ring])))
            r.add("(V1): V_l decays at the box boundary", vb < boundary_eps,
                  f"max |V_l| on boundary ring = {vb:.3g} (eps = {boundary_eps:g})")
    return r


def boundary_ring(grid: Grid, width: int = 1):
    """Mask of nodes within ``width`` cells of the box faces."""
    idx = np.indices(grid.shape)
    M = grid.points
    return np.any((idx < width) | (idx >= M - width), axis=0)


@dataclass
class PointwiseCheck:
    holds: bool
    node: Optional[tuple] = None
    position: Optional[tuple] = None

    def __bool__(self):
        return self.holds


def _pointwise(grid, mask):
    if np.all(mask):
        return PointwiseCheck(True)
    bad = np.argwhere(~mask)[0]
    pos = tuple(float(grid.axis[i]) for i in bad)
    return PointwiseCheck(False, tuple(int(i) for i in bad), pos)


def check_a1(params: ModelParams, grid: Grid, potentials: PotentialSet) -> PointwiseCheck:
    """V_l(x) < mu/|x| at every node."""
    if params.mu == 0:
        raise UsageError("condition (a1) is undefined for mu = 0")
    return _pointwise(grid, potentials.v_local < params.mu / grid.radius)


def check_a2(params: ModelParams, grid: Grid, potentials: PotentialSet) -> PointwiseCheck:
    """V_l(x) > mu/|x| at every node."""
    if params.mu == 0:
        raise UsageError("condition (a2) is undefined for mu = 0")
    return _pointwise(grid, potentials.v_local > params.mu / grid.radius)


# ---------------------------------------------------------------- potentials

def parse_potential(text: str) -> Callable:
    """Built-in potential from ``name[:arg[:arg]]``.

    zero | const:c | cos:c:a (c + a sum cos 2 pi x_i) | gauss:A:w (A exp(-|x|^2/w^2))
    | exp:A:w (A exp(-|x|/w))
    """
    name, *args = [s.strip() for s in text.strip().split(":")]
    try:
        vals = [float(a) for a in args]
    except ValueError:
        raise UsageError(f"potential {text!r}: arguments must be numbers") from None
    need = {"zero": 0, "const": 1, "cos": 2, "gauss": 2, "exp": 2}
    if name not in need:
        raise UsageError(f"unknown potential {name!r}; known: {sorted(need)}")
    if len(vals) != need[name]:
        raise UsageError(f"potential {name!r} takes {need[name]} argument(s), got {len(vals)}")
    if name == "zero":
        return lambda x: 0.0
    if name == "const":
        c = vals[0]
        return lambda x: c
    if name == "cos":
        c, a = vals
        return lambda x: c + a * sum(np.cos(2 * math.pi * xi) for xi in x)
    A, w = vals
    if name == "gauss":
        return lambda x: A * np.exp(-sum(xi * xi for xi in x) / (w * w))
    return lambda x: A * np.exp(-np.sqrt(sum(xi * xi for xi in x)) / w)


def _sample(grid, fun):
    if isinstance(fun, str):
        fun = parse_potential(fun)
    v = fun(grid.coords) if callable(fun) else fun
    return np.broadcast_to(np.asarray(v, dtype=float), grid.shape).copy()


def coulomb_samples(grid: Grid, mode: str = "pointwise"):
    """1/|x| at the (offset) nodes, or its cell averages."""
    if mode == "pointwise":
        return 1.0 / grid.radius
    if mode != "cell":
        raise UsageError(f"unknown coulomb mode {mode!r}")
    N, h, r = grid.dim, grid.spacing, grid.radius
    out = _cell_gauss(grid.coords, h, 1, 6)
    # cells within a few h of the singular corner: composite rule, 4 subcells per axis
    near = r < 4.0 * h
    out[near] = _cell_gauss([c[near] for c in grid.coords], h, 4, 8)
    out[np.all([np.abs(c) < h for c in grid.coords], axis=0)] = _corner_cell_average(N) / h
    return out


def _cell_gauss(centres, h, sub, order):
    """Mean of 1/|x| over the cells h-cubes around ``centres`` (tensor Gauss-Legendre)."""
    nodes, wts = np.polynomial.legendre.leggauss(order)
    offs = ((np.arange(sub) + 0.5) / sub - 0.5)[:, None] + 0.5 * nodes[None, :] / sub
    offs, w1 = (h * offs).ravel(), np.tile(0.5 * wts / sub, sub)
    acc = np.zeros_like(centres[0], dtype=float)
    for ix in itertools.product(range(offs.size), repeat=len(centres)):
        r2 = sum((c + offs[i]) ** 2 for c, i in zip(centres, ix))
        acc += np.prod(w1[list(ix)]) / np.sqrt(r2)
    return acc


def _corner_cell_average(N, order=48):
    # int_{[0,1]^N} |z|^-1 dz: N pyramids on the far faces, radial factor 1/(N-1)
    nodes, wts = np.polynomial.legendre.leggauss(order)
    y = 0.5 * (nodes + 1.0)
    w = 0.5 * wts
    grids = np.meshgrid(*([y] * (N - 1)), indexing="ij")
    weights = np.ones_like(grids[0])
    for ax in range(N - 1):
        sl = [None] * (N - 1)
        sl[ax] = slice(None)
        weights = weights * w[tuple(sl)]
    face = float(np.sum(weights / np.sqrt(1.0 + sum(g * g for g in grids))))
    return N * face / (N - 1)


def build_potentials(grid: Grid, v_p, v_l, k, coulomb: str = "pointwise") -> PotentialSet:
    vp = _sample(grid, v_p)
    vl = _sample(grid, v_l)
    kw = _sample(grid, k)
    if np.any(kw < 0):
        bad = tuple(int(i) for i in np.argwhere(kw < 0)[0])
        raise ConstraintError(f"(K) violated: K < 0 at node {bad}")
    periodic = None
    cells = grid.cells_per_unit()
    if cells is not None and cells < grid.points:
        scale = 1.0 + float(np.max(np.abs(vp)))
        periodic = all(
            float(np.max(np.abs(np.roll(vp, cells, axis=ax) - vp))) <= 1e-10 * scale
            for ax in range(grid.dim)
        )
    return PotentialSet(vp, vl, kw, coulomb_samples(grid, coulomb), periodic)


# ------------------------------------------------------------------ problem

@dataclass(eq=False)
class Problem:
    """Everything an energy evaluation needs, assembled once."""
    grid: Grid
    params: ModelParams
    potentials: PotentialSet
    nl: NonlinearitySpec
    convolution: str = "fft_kernel"

    def __post_init__(self):
        if self.params.dim != self.grid.dim:
            raise UsageError(f"params.dim = {self.params.dim} but grid.dim = {self.grid.dim}")

    @classmethod
    def build(cls, grid, params, nl, v_p=2.0, v_l=0.0, k=0.0, coulomb="pointwise",
              strict=True, require_v2=True, convolution="fft_kernel"):
        pots = build_potentials(grid, v_p, v_l, k, coulomb)
        prob = cls(grid, params, pots, nl, convolution)
        if strict:
            rep = prob.validate(require_v2=require_v2)
            if not rep.ok:
                raise ConstraintError("; ".join(f"{c.name} violated ({c.message})" for c in rep.failures))
        return prob

    def validate(self, require_v2=True, boundary_eps=1e-3):
        return validate(self.params, self.potentials, boundary_eps, self.grid, require_v2)

    def with_mu(self, mu):
        params = ModelParams(self.params.dim, self.params.mass, mu, self.params.alpha,
                             self.params.p, self.params.q)
        new = Problem(self.grid, params, self.potentials, self.nl, self.convolution)
        new.__dict__["plan"] = self.plan
        return new

    @cached_property
    def plan(self):
        return RieszPlan(self.grid, self.params.alpha, self.convolution)

    @cached_property
    def v_minus_m(self):
        return self.potentials.v_total - self.params.mass

    @cached_property
    def essinf_v(self):
        return float(np.min(self.potentials.v_total))

    @property
    def has_k(self):
        return bool(np.any(self.potentials.k_weight != 0))

    @property
    def lattice_invariant(self):
        """E is invariant under Z^N shifts (mu = 0 and V_l = 0)."""
        return self.params.mu == 0 and not np.any(self.potentials.v_local != 0)

    @property
    def translation_invariant(self):
        """E is invariant under every grid shift (additionally every coefficient field is constant)."""
        pots = self.potentials
        const = lambda a: np.ptp(np.asarray(a)) == 0
        return (self.lattice_invariant and const(pots.v_periodic) and const(pots.k_weight)
                and const(self.nl.weight))
