"""Quadratic forms Q and Q_mu; the energy functional with its first variation.

Every piece is assembled from the spectral and Riesz primitives so that
finite differences of ``energy`` reproduce ``first_variation`` to round-off
level of the discretization, not just of the continuum limit.
"""
from __future__ import annotations

from dataclasses import dataclass, astuple, fields

import numpy as np

from . import spectral as sp
from .constants import c_n_half, hardy_sharp
from .model import Problem
from .riesz import dd_value

CSV_HEADER = "kinetic_potential,coulomb,hartree,k_term,total"


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic_potential: float  # Q(u) / 2
    coulomb: float            # -(mu/2) int u^2/|x|
    hartree: float            # -D(u) / 2
    k_term: float             # (1/q) int K |u|^q
    total: float

    def as_row(self):
        return ",".join(f"{v:.17g}" for v in astuple(self))

    @classmethod
    def from_parts(cls, kp, co, ha, kt):
        return cls(kp, co, ha, kt, kp + co + ha + kt)

    @classmethod
    def zero(cls):
        return cls(0.0, 0.0, 0.0, 0.0, 0.0)


def _abs_pow(u, t):
    return np.abs(u) ** t


def _signed_pow(u, t):
    # sign(u) |u|^t; zero at u = 0 for t > 0
    return np.sign(u) * np.abs(u) ** t


def kinetic(prob: Problem, u):
    return sp.kinetic_quadratic(prob.grid, u, prob.params.mass)


def q_form(prob: Problem, u, include_local: bool = True):
    """Q(u) = int sqrt(|xi|^2+m^2)|u_hat|^2 + <(V - m) u, u>."""
    g = prob.grid
    w = prob.v_minus_m if include_local else prob.potentials.v_periodic - prob.params.mass
    return kinetic(prob, u) + float(np.sum(w * u * u) * g.cell_volume)


def coulomb_integral(prob: Problem, u):
    return float(np.sum(prob.potentials.coulomb * u * u) * prob.grid.cell_volume)


def q_mu_form(prob: Problem, u):
    mu = prob.params.mu
    q = q_form(prob, u)
    return q if mu == 0 else q - mu * coulomb_integral(prob, u)


norm_mu_sq = q_mu_form


def k_integral(prob: Problem, u):
    if not prob.has_k:
        return 0.0
    return float(np.sum(prob.potentials.k_weight * _abs_pow(u, prob.params.q)) * prob.grid.cell_volume)


def energy(prob: Problem, u) -> EnergyBreakdown:
    u = prob.grid.check(u)
    kp = 0.5 * q_form(prob, u)
    co = -0.5 * prob.params.mu * coulomb_integral(prob, u) if prob.params.mu != 0 else 0.0
    ha = -0.5 * dd_value(prob.plan, u, prob.nl)
    kt = k_integral(prob, u) / prob.params.q
    return EnergyBreakdown.from_parts(kp, co, ha, kt)


def energy_per(prob: Problem, u) -> EnergyBreakdown:
    """Energy without V_l and without the Coulomb term; invariant under Z^N shifts."""
    u = prob.grid.check(u)
    kp = 0.5 * q_form(prob, u, include_local=False)
    ha = -0.5 * dd_value(prob.plan, u, prob.nl)
    kt = k_integral(prob, u) / prob.params.q
    return EnergyBreakdown.from_parts(kp, 0.0, ha, kt)


def interaction(prob: Problem, u):
    """I(u) = D(u)/2 - (1/q) int K|u|^q, so that E = ||u||_mu^2 / 2 - I(u)."""
    return 0.5 * dd_value(prob.plan, u, prob.nl) - k_integral(prob, u) / prob.params.q


def gradient_field(prob: Problem, u):
    """L^2 representative g of E'(u): <g, phi>_{L^2} = E'(u)(phi)."""
    g = prob.grid
    u = g.check(u)
    m = prob.params.mass
    out = sp.apply_sqrt_lap(g, u, m) + prob.v_minus_m * u
    if prob.params.mu != 0:
        out -= prob.params.mu * prob.potentials.coulomb * u
    out -= prob.plan.convolve(prob.nl.F(u)) * prob.nl.f(u)
    if prob.has_k:
        out += prob.potentials.k_weight * _signed_pow(u, prob.params.q - 1.0)
    return out


def first_variation(prob: Problem, u, phi):
    return sp.l2_inner(prob.grid, gradient_field(prob, u), phi)


def gradient_norm(prob: Problem, u):
    return sp.lp_norm(prob.grid, gradient_field(prob, u), 2.0)


# ------------------------------------------------------------- sandwich bounds

@dataclass
class SandwichReport:
    gagliardo_sq: float
    l2_sq: float
    q_value: float
    q_mu_value: float
    lower_constant: float
    upper_constant: float
    lower_margin: float
    upper_margin: float
    mu_lower_constant: float
    mu_lower_margin: float
    coercive: bool

    @property
    def holds(self):
        ok = self.lower_margin >= 0 and self.upper_margin >= 0
        if self.coercive:
            ok = ok and self.mu_lower_margin >= 0
        return ok


def sandwich_check(prob: Problem, u, rtol: float = 1e-12) -> SandwichReport:
    """Both sides of the norm equivalence with the explicit constants.

    lower  min(C/2, essinf V - m) ([u]^2 + |u|_2^2) <= Q(u)
    upper  Q(u) <= max(C/2, |V|_inf) ([u]^2 + |u|_2^2)
    and for Q_mu the lower constant min(C/2 - mu/C_H, essinf V - m), which is
    positive exactly when mu < mu*(N).  Margins are relative to the right-hand
    side, so tiny negative values at round-off are tolerated by ``rtol``.
    """
    g = prob.grid
    N = g.dim
    half_c = 0.5 * c_n_half(N)
    gap = prob.essinf_v - prob.params.mass
    vinf = float(np.max(np.abs(prob.potentials.v_total)))
    semi = sp.gagliardo_sq(g, u)
    l2 = sp.l2_inner(g, u, u)
    base = semi + l2
    qv = q_form(prob, u)
    qmu = qv - prob.params.mu * coulomb_integral(prob, u)
    lo = min(half_c, gap)
    hi = max(half_c, vinf)
    mlo = min(half_c - prob.params.mu / hardy_sharp(N), gap)
    scale = max(abs(qv), base, np.finfo(float).tiny)

    def margin(x):
        return 0.0 if abs(x) <= rtol * scale else x / scale

    return SandwichReport(
        gagliardo_sq=semi, l2_sq=l2, q_value=qv, q_mu_value=qmu,
        lower_constant=lo, upper_constant=hi,
        lower_margin=margin(qv - lo * base), upper_margin=margin(hi * base - qv),
        mu_lower_constant=mlo, mu_lower_margin=margin(qmu - mlo * base),
        coercive=mlo > 0,
    )


# ---------------------------------------------------- small-sphere positivity

@dataclass
class SmallSphereReport:
    radius: float
    constant: float
    min_energy: float
    bound: float

    @property
    def holds(self):
        return self.min_energy >= self.bound


def _growth_constant(prob, unit_fields, scales):
    p = prob.nl.p
    best = 0.0
    for v in unit_fields:
        for s in scales:
            d = 0.5 * dd_value(prob.plan, s * v, prob.nl)
            best = max(best, d / (s ** 4 + s ** (p + 2) + s ** (2 * p)))
    return best


def small_sphere_radius(prob: Problem, samples, scales=None, C: float = None,
                        tol: float = 1e-12) -> SmallSphereReport:
    """Radius r with E >= r^2/4 on the sphere ||u||_mu = r.

    The constant C of the bound D(u)/2 <= C(||u||^4 + ||u||^(p+2) + ||u||^(2p))
    is not explicit; by default it is estimated as the largest ratio seen on
    the samples over ``scales``.  Then A(r) = C (r^2 + r^p + r^(2p-2)) = 1/4
    is solved by bisection and the energy is checked on every rescaled sample.
    """
    p = prob.nl.p
    units = []
    for u in samples:
        n = np.sqrt(norm_mu_sq(prob, u))
        units.append(u / n)
    if scales is None:
        scales = np.logspace(-3, 2, 26)
    if C is None:
        C = _growth_constant(prob, units, scales)
    if C <= 0:
        return SmallSphereReport(np.inf, C, np.inf, np.inf)

    def A(r):
        return C * (r * r + r ** p + r ** (2 * p - 2))

    lo, hi = 0.0, 1.0
    while A(hi) < 0.25:
        hi *= 2.0
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if A(mid) < 0.25 else (lo, mid)
    r = 0.5 * (lo + hi)
    emin = min(energy(prob, r * v).total for v in units)
    return SmallSphereReport(r, C, emin, 0.25 * r * r)


def breakdown_fields():
    return [f.name for f in fields(EnergyBreakdown)]
