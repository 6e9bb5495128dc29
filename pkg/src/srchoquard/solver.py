"""Ground states by preconditioned descent on the Nehari manifold, plus the mu-continuation
and the nonexistence (escaping mass) probe.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import spectral as sp
from .constants import mu_star
from .energy import EnergyBreakdown, energy, gradient_field
from .errors import ContinuationError, ProjectionError, StagnationError, UsageError
from .model import Problem, check_a2
from .nehari import nehari_residual, project

log = logging.getLogger(__name__)

ITER_CSV_HEADER = "iter,energy,grad_norm,nehari_residual,t_star"


@dataclass
class SolveOptions:
    max_iters: int = 2000
    grad_tol: float = 1e-8
    step_rule: str = "backtracking"
    step: float = 1.0
    precondition_shift: Optional[float] = None  # default: essinf V - m
    seed: int = 0
    restarts: int = 1
    stall_window: int = 25
    recenter_every: int = 50
    t_max: float = 1e6
    nehari_tol: float = 1e-10
    escape_radius: Optional[float] = None  # default L/4, used when mu < 0
    perturbation: float = 0.3

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise UsageError("grad_tol must be positive")
        if self.precondition_shift is not None and not self.precondition_shift > 0:
            raise UsageError("precondition_shift must be positive")
        if self.step_rule not in ("fixed", "backtracking"):
            raise UsageError(f"unknown step rule {self.step_rule!r}")
        if self.restarts < 1:
            raise UsageError("restarts counts runs and must be >= 1")


@dataclass
class GroundStateResult:
    field: np.ndarray
    energy: float
    breakdown: EnergyBreakdown
    nehari_residual: float
    grad_norm: float
    iterations: int
    restart_energies: list
    converged: bool = True
    history: list = field(default_factory=list, repr=False)
    seeds: list = field(default_factory=list)
    t_star: float = 1.0


# ------------------------------------------------------------- initial data

def gaussian(grid: sp.Grid, width: float = None, centre=None, amplitude: float = 1.0):
    width = grid.box_length / 8.0 if width is None else width
    c = np.zeros(grid.dim) if centre is None else np.asarray(centre, dtype=float)
    r2 = sum((x - ci) ** 2 for x, ci in zip(grid.coords, c))
    return amplitude * np.exp(-r2 / (width * width))


def initial_field(prob: Problem, init: Union[str, np.ndarray, None] = None):
    """Presets: ``gaussian`` (width L/8, on the node nearest the origin) or ``two-bump``."""
    g = prob.grid
    if init is None or (isinstance(init, str) and init == "gaussian"):
        # centring on a node rather than on the origin (a cell corner) matters when
        # the profile is only a few cells wide: corner-centred states are saddles
        return gaussian(g, centre=np.full(g.dim, 0.5 * g.spacing))
    if isinstance(init, str):
        if init == "two-bump":
            d = np.zeros(g.dim)
            d[0] = g.box_length / 8.0
            w = g.box_length / 16.0
            return gaussian(g, w, d) + gaussian(g, w, -d)
        raise UsageError(f"unknown init preset {init!r}; known: gaussian, two-bump")
    return np.array(g.check(init), dtype=float)


def perturbed(prob: Problem, u, rng, amount):
    """u (1 + amount w) with w a random band-limited field, max |w| = 1."""
    g = prob.grid
    noise = sp.band_limited_random(g, rng, kmax=16.0 * math.pi / g.box_length)
    return u * (1.0 + amount * noise)


def profile_centre(grid: sp.Grid, u):
    """Node carrying max |u|, the centre about which symmetry defects are measured."""
    i = np.unravel_index(np.argmax(np.abs(u)), grid.shape)
    return np.array([grid.axis[k] for k in i])


def radial_defect(grid: sp.Grid, u):
    c = profile_centre(grid, u)
    if np.ptp(c) != 0:
        # axis permutations need equal coordinates; move the centre onto the diagonal
        cells = np.rint((c - c[0]) / grid.spacing).astype(int)
        u = np.roll(u, tuple(int(-k) for k in cells), axis=tuple(range(grid.dim)))
        c = np.full(grid.dim, c[0])
    return sp.symmetry_defect(grid, u, c)


# ---------------------------------------------------------------- locator

def concentration_locator(grid: sp.Grid, v, radius: float, lattice: str = "grid"):
    """Translation z maximizing the discrete ball mass sum_{|x - z| < radius} |v|^2 h^N.

    Candidates z are grid-exact shifts (the cell corners, which include the
    origin) or, with ``lattice='integer'``, points of Z^N.
    """
    if not radius > 0:
        raise UsageError("radius must be positive")
    v = grid.check(v)
    M, h = grid.points, grid.spacing
    d = np.arange(M)
    d = np.where(d < M // 2, d, d - M)
    disp = np.meshgrid(*([(d + 0.5) * h] * grid.dim), indexing="ij")
    ball = (np.sqrt(sum(x * x for x in disp)) < radius).astype(float)
    dens = np.abs(v) ** 2
    mass = np.fft.ifftn(np.fft.fftn(dens) * np.conj(np.fft.fftn(ball))).real * grid.cell_volume
    if lattice == "integer":
        cells = grid.cells_per_unit()
        if cells is None:
            raise UsageError("integer lattice needs an integer number of cells per unit length")
        mask = np.zeros(grid.shape, dtype=bool)
        sl = tuple(slice(M // 2 % cells, None, cells) for _ in range(grid.dim))
        mask[sl] = True
        mass = np.where(mask, mass, -np.inf)
    elif lattice != "grid":
        raise UsageError(f"unknown lattice {lattice!r}")
    # corner index s is the translation c = s - M/2 (already minimum image);
    # exact ties (symmetric fields) resolve to the candidate nearest the origin
    c = np.indices(grid.shape) - M // 2
    dist = np.sum(c * c, axis=0)
    top = mass.max()
    cand = np.argwhere(mass >= top - 1e-13 * abs(top))
    best = min(cand, key=lambda i: dist[tuple(i)])
    z = (best - M // 2) * h
    return np.array(z), float(mass[tuple(best)])


def _centre_of(grid, v):
    z, _ = concentration_locator(grid, v, grid.box_length / 8.0)
    return z


# ------------------------------------------------------------------ descent

def _descend(prob: Problem, u0, opts: SolveOptions, rng):
    g = prob.grid
    sigma = opts.precondition_shift or max(prob.essinf_v - prob.params.mass, 1e-3)
    precond = 1.0 / (sp.sqrt_lap_symbol(g, prob.params.mass) + sigma)
    escape = opts.escape_radius or 0.25 * g.box_length
    watch_escape = prob.params.mu < 0
    recenter = opts.recenter_every and prob.params.mu == 0
    use_integer = recenter and not prob.translation_invariant
    if use_integer and (not prob.lattice_invariant or g.cells_per_unit() is None):
        recenter = False

    fib = project(prob, u0, tol=opts.nehari_tol, t_max=opts.t_max)
    u = fib.t_star * u0
    e = energy(prob, u).total
    grad = gradient_field(prob, u)
    gn = sp.lp_norm(g, grad)
    history = [(0, e, gn, nehari_residual(prob, u), fib.t_star)]
    best_e, best_g, stall = e, gn, 0
    tau = opts.step
    it = 0
    while gn > opts.grad_tol and it < opts.max_iters:
        it += 1
        d = -sp.apply_multiplier(g, grad, precond)
        slope = sp.l2_inner(g, grad, d)
        accepted = False
        for _ in range(40):
            try:
                fib = project(prob, u + tau * d, tol=opts.nehari_tol, t_max=opts.t_max)
            except ProjectionError:
                if opts.step_rule == "fixed":
                    raise
                tau *= 0.5
                continue
            w = fib.t_star * (u + tau * d)
            ew = energy(prob, w).total
            if opts.step_rule == "fixed":
                accepted = True
                break
            if ew <= e + 1e-4 * tau * slope:
                accepted = True
                break
            if abs(ew - e) <= 1e-13 * abs(e):
                # energy differences are round-off: judge by the residual instead
                gw = sp.lp_norm(g, gradient_field(prob, w))
                if gw < gn:
                    accepted = True
                    break
            tau *= 0.5
        if not accepted:
            stall = opts.stall_window
        else:
            u, e = w, ew
            if opts.step_rule == "backtracking":
                tau = min(4.0 * opts.step, 1.5 * tau)
        if recenter and it % opts.recenter_every == 0:
            if use_integer:
                z, _ = concentration_locator(g, u, 1.0 + math.sqrt(g.dim), lattice="integer")
            else:
                z = _centre_of(g, u)
            if np.any(z != 0):
                u = sp.shift(g, u, -z)
        grad = gradient_field(prob, u)
        gn = sp.lp_norm(g, grad)
        history.append((it, e, gn, nehari_residual(prob, u), fib.t_star))
        if watch_escape and it % 10 == 0:
            z = _centre_of(g, u)
            if np.linalg.norm(z) > escape:
                raise StagnationError(
                    f"mass escaped from the origin to |z| = {np.linalg.norm(z):.3g} after {it} "
                    "iterations; the infimum is not attained (use probe-nonexistence)",
                    {"iterations": it, "energy": e, "grad_norm": gn, "centre": z.tolist(),
                     "history": history, "reason": "escape"},
                )
        improved = e < best_e - 1e-14 * abs(best_e) or gn < best_g
        best_e, best_g = min(best_e, e), min(best_g, gn)
        stall = 0 if improved else stall + 1
        if stall >= opts.stall_window:
            raise StagnationError(
                f"no decrease of the energy or the residual for {opts.stall_window} iterations "
                f"(iteration {it}, energy {e:.17g}, grad_norm {gn:.3e})",
                {"iterations": it, "energy": e, "grad_norm": gn, "history": history,
                 "reason": "stagnation"},
            )
    if watch_escape:
        _escape_test(prob, u, e, opts, history, it, gn)
    return u, e, gn, it, history, fib.t_star


def _escape_test(prob, u, e, opts, history, it, gn):
    # a converged state that loses energy when carried to the far side of the box
    # is not a minimizer: the infimum is approached by escaping translates
    g = prob.grid
    z = np.zeros(g.dim)
    z[0] = 0.5 * g.box_length
    far = project(prob, sp.shift(g, u, z), tol=opts.nehari_tol, t_max=opts.t_max)
    if far.energy < e - 1e-12 * abs(e):
        raise StagnationError(
            f"descent settled at energy {e:.17g}, but the translate by L/2 e_1 has "
            f"{far.energy:.17g}; the infimum escapes to infinity (use probe-nonexistence)",
            {"iterations": it, "energy": e, "grad_norm": gn, "far_energy": far.energy,
             "history": history, "reason": "escape"},
        )


def _canonical_position(prob, u):
    """Roll a translation-invariant minimizer so its peak sits on the node (h/2, ..., h/2).

    Restarts can tie to the last bit at different positions; without this the
    returned field, and anything probed relative to the origin, would depend on
    the restart count.  Only symmetries of E are used: any grid roll when the
    model is translation invariant, whole periods when it is Z^N invariant.
    """
    g = prob.grid
    if prob.translation_invariant:
        step = 1
    elif prob.lattice_invariant and g.cells_per_unit() is not None:
        step = g.cells_per_unit()
    else:
        return u
    target = g.points // 2  # index of the node h/2
    peak = np.unravel_index(np.argmax(np.abs(u)), g.shape)
    roll = tuple(int(step * np.rint((target - i) / step)) for i in peak)
    return np.roll(u, roll, axis=tuple(range(g.dim)))


def ground_state(prob: Problem, init=None, opts: SolveOptions = None) -> GroundStateResult:
    """Minimize E over the Nehari manifold; the lowest-energy restart is returned."""
    opts = opts or SolveOptions()
    base = initial_field(prob, init)
    runs = []
    seeds = []
    for k in range(opts.restarts):
        seed = opts.seed + k
        rng = np.random.default_rng(seed)
        seeds.append(seed)
        if k == 0 and prob.params.mu >= 0:
            u0 = base
        else:
            # restarts, and every run of the mu < 0 regime, start off symmetry
            u0 = perturbed(prob, base, rng, opts.perturbation)
        log.info("run %d seed %d", k, seed)
        runs.append(_descend(prob, u0, opts, rng))
    energies = [r[1] for r in runs]
    u, e, gn, it, history, t_star = runs[int(np.argmin(energies))]
    if np.sum(u) < 0:
        u = -u
    u = _canonical_position(prob, u)
    return GroundStateResult(
        field=u, energy=e, breakdown=energy(prob, u), nehari_residual=nehari_residual(prob, u),
        grad_norm=gn, iterations=it, restart_energies=energies, converged=gn <= opts.grad_tol,
        history=history, seeds=seeds, t_star=t_star,
    )


def write_history_csv(path, history):
    with open(path, "w") as fh:
        fh.write(ITER_CSV_HEADER + "\n")
        for it, e, gn, res, t in history:
            fh.write(f"{it},{e:.17g},{gn:.17g},{res:.17g},{t:.17g}\n")


# ------------------------------------------------------------ continuation

@dataclass
class ContinuationTable:
    mus: list
    energies: list
    c0: float
    gaps: list
    iterations: list
    seed: int = 0

    def rows(self):
        return list(zip(self.mus, self.energies, self.gaps, self.iterations))


def continuation_mu(prob: Problem, mu_schedule, opts: SolveOptions = None, init=None,
                    slack: float = 1e-10) -> ContinuationTable:
    """Warm-started solves mu_1 > mu_2 > ... and a final mu = 0 solve.

    Asserts c_n <= c_0 and that |c_n - c_0| does not grow along the schedule,
    both up to ``slack`` relative to c_0.
    """
    opts = opts or SolveOptions()
    mus = [float(m) for m in mu_schedule]
    if not mus:
        raise UsageError("empty mu schedule")
    ms = mu_star(prob.grid.dim)
    if any(not 0 < m < ms for m in mus):
        raise UsageError(f"schedule entries must lie in (0, mu*(N) = {ms:.6g})")
    if any(b >= a for a, b in zip(mus, mus[1:])):
        raise UsageError("mu schedule must be strictly decreasing")
    if np.any(prob.potentials.v_local != 0):
        raise UsageError("continuation in mu requires V_l = 0")
    energies, iters = [], []
    u = init
    for m in mus:
        try:
            res = ground_state(prob.with_mu(m), u, opts)
        except (StagnationError, ProjectionError) as exc:
            partial = ContinuationTable(mus[:len(energies)], energies, math.nan, [], iters, opts.seed)
            raise ContinuationError(f"solve at mu = {m:.17g} failed: {exc}", partial) from exc
        energies.append(res.energy)
        iters.append(res.iterations)
        u = res.field
        log.info("mu %.6g  c %.17g  iters %d", m, res.energy, res.iterations)
    try:
        res0 = ground_state(prob.with_mu(0.0), u, opts)
    except (StagnationError, ProjectionError) as exc:
        partial = ContinuationTable(mus, energies, math.nan, [], iters, opts.seed)
        raise ContinuationError(f"final mu = 0 solve failed: {exc}", partial) from exc
    c0 = res0.energy
    gaps = [c0 - c for c in energies]
    table = ContinuationTable(mus, energies, c0, gaps, iters, opts.seed)
    tol = slack * abs(c0)
    bad = [m for m, gp in zip(mus, gaps) if gp < -tol]
    if bad:
        raise ContinuationError(f"c_n > c_0 at mu = {bad}", table)
    if any(b > a + tol for a, b in zip(gaps, gaps[1:])):
        raise ContinuationError("gap |c_n - c_0| increased along the schedule", table)
    return table


# ---------------------------------------------------------- nonexistence probe

@dataclass
class ProbeRow:
    shift: float
    energy: float
    t_star: float


def nonexistence_probe(prob: Problem, base_profile, shifts, check_hypotheses: bool = True,
                       tol: float = 1e-10, t_max: float = 1e6):
    """sup_t E(t u(. - z)) for translations z (scalars are taken along e_1).

    With mu < 0 and (a2) the values decrease toward the periodic level as |z|
    grows, the numerical face of a non-attained infimum.
    """
    g = prob.grid
    if check_hypotheses:
        if not prob.params.mu < 0:
            raise UsageError("nonexistence probe needs mu < 0 (pass check_hypotheses=False for controls)")
        if not check_a2(prob.params, g, prob.potentials):
            raise UsageError("condition (a2) fails on the grid")
    u = g.check(base_profile)
    rows = []
    for z in shifts:
        zv = np.zeros(g.dim)
        if np.ndim(z) == 0:
            zv[0] = float(z)
        else:
            zv = np.asarray(z, dtype=float)
        if np.linalg.norm(zv) > 0.5 * g.box_length * (1 + 1e-12):
            raise UsageError(f"shift |z| = {np.linalg.norm(zv):g} exceeds L/2 = {0.5 * g.box_length:g}")
        v = sp.shift(g, u, zv)
        fib = project(prob, v, tol=tol, t_max=t_max)
        rows.append(ProbeRow(float(np.linalg.norm(zv)), fib.energy, fib.t_star))
    return rows
