"""Fibering map t -> E(t u) and projection onto the Nehari manifold."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .energy import coulomb_integral, energy, first_variation, k_integral, q_form
from .errors import ProjectionError, UsageError
from .model import Problem

FIBER_CSV_HEADER = "t,energy,dphi"


@dataclass
class FiberingResult:
    t_star: float
    residual_at_t: float
    bracket: tuple
    evaluations: int
    energy: float = math.nan

    def field(self, u):
        return self.t_star * u


def nehari_residual(prob: Problem, u) -> float:
    """E'(u)(u) = ||u||_mu^2 - D'(u)(u)/2 + int K|u|^q."""
    return first_variation(prob, u, u)


class _Fiber:
    """g(t) = E'(t u)(u) with the t-independent integrals computed once."""

    def __init__(self, prob, u):
        self.prob = prob
        self.u = u
        self.qmu = q_form(prob, u) - (prob.params.mu * coulomb_integral(prob, u) if prob.params.mu else 0.0)
        self.kint = k_integral(prob, u)
        self.count = 0

    def hartree(self, t):
        prob, tu = self.prob, t * self.u
        conv = prob.plan.convolve(prob.nl.F(tu))
        return float(np.sum(conv * prob.nl.f(tu) * self.u) * prob.grid.cell_volume)

    def __call__(self, t):
        self.count += 1
        return t * self.qmu - self.hartree(t) + t ** (self.prob.params.q - 1.0) * self.kint


def project(prob: Problem, u, tol: float = 1e-10, t_max: float = 1e6, t_min: float = 1e-12,
            maxiter: int = 80) -> FiberingResult:
    """Unique critical point t* of t -> E(t u), by bracketing then Brent's method.

    ``tol`` bounds |E'(t* u)(t* u)| relative to ||t* u||_mu^2.
    """
    u = prob.grid.check(u)
    if not np.any(u):
        raise UsageError("cannot project the zero field onto the Nehari manifold")
    g = _Fiber(prob, u)
    if not g.qmu > 0:
        raise ProjectionError(f"||u||_mu^2 = {g.qmu:.3e} is not positive; Q_mu lost coercivity",
                              code="non-coercive")
    t_lo = t_hi = 1.0
    g1 = g(1.0)
    if g1 > 0:
        gh = g1
        while gh > 0:
            t_lo, t_hi = t_hi, 2.0 * t_hi
            if t_hi > t_max:
                raise ProjectionError(
                    f"no sign change of E'(tu)(u) below t_max = {t_max:g}; the K term dominates "
                    "or t_max is too small", code="no-sign-change")
            gh = g(t_hi)
    elif g1 < 0:
        gl = g1
        while gl < 0:
            t_lo, t_hi = 0.5 * t_lo, t_lo
            if t_lo < t_min:
                raise ProjectionError(f"E'(tu)(u) stays negative down to t = {t_min:g}",
                                      code="no-small-t-positivity")
            gl = g(t_lo)
    else:
        t_lo = t_hi = 1.0
    if t_lo == t_hi:
        t_star = 1.0
    else:
        t_star = brentq(g, t_lo, t_hi, xtol=1e-16 * t_hi, rtol=4 * np.finfo(float).eps, maxiter=maxiter)
    res = t_star * g(t_star)
    scale = t_star * t_star * g.qmu
    if abs(res) > tol * scale:
        raise ProjectionError(f"residual {res:.3e} above tolerance after {g.count} evaluations",
                              code="residual")
    return FiberingResult(t_star, res, (t_lo, t_hi), g.count, energy(prob, t_star * u).total)


def fibering_scan(prob: Problem, u, t_grid):
    """Rows (t, E(t u), E'(t u)(u)) on an increasing positive grid."""
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= 0) or np.any(np.diff(t_grid) <= 0):
        raise UsageError("t_grid must be positive and strictly increasing")
    u = prob.grid.check(u)
    g = _Fiber(prob, u)
    return [(float(t), energy(prob, t * u).total, g(t)) for t in t_grid]


def sign_changes(values):
    s = np.sign(np.asarray(values, dtype=float))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def write_fibering_csv(path, rows):
    with open(path, "w") as fh:
        fh.write(FIBER_CSV_HEADER + "\n")
        for t, e, d in rows:
            fh.write(f"{t:.17g},{e:.17g},{d:.17g}\n")


def in1_margin(prob: Problem, u):
    """<I_a * F(u), f(u) u> - int K|u|^q; positive on the Nehari manifold."""
    conv = prob.plan.convolve(prob.nl.F(u))
    lhs = float(np.sum(conv * prob.nl.f(u) * u) * prob.grid.cell_volume)
    return lhs - k_integral(prob, u)
