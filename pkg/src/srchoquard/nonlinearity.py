"""Nonlinearities (f, F) and sampling-based checkers for their standing hypotheses.

Families (``u >= 0`` shown, all extended oddly in ``f`` so ``F`` is even):

* ``power``:               f = |u|^(p-2) u,            F = |u|^p / p
* ``log_power``:           f = L u log(1 + |u|^(p-2)), F tabulated (no closed form)
* ``piecewise_sublinear``: base |u|^(p-2) u below 1, L u^((q-2)/2) on [1, M],
                           rescaled base above M
* ``linear``:              f = u, a control that deliberately violates f = o(u)
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline

from .errors import DomainError

KINDS = ("power", "log_power", "piecewise_sublinear", "linear")


@dataclass(frozen=True, eq=False)
class NonlinearitySpec:
    kind: str
    p: float
    q: float
    weight: Union[float, np.ndarray] = 1.0
    m_break: float = 2.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown nonlinearity kind {self.kind!r}; expected one of {KINDS}")
        if np.any(np.asarray(self.weight) <= 0):
            raise DomainError("weight L must satisfy inf L > 0")
        if self.kind == "piecewise_sublinear" and not self.m_break > 1:
            raise DomainError("piecewise family needs M > 1")
        if self.kind == "log_power" and not self.p > 2:
            raise DomainError("log_power needs p > 2")

    @property
    def homogeneous(self):
        """True when F(s u) = s^p F(u) exactly."""
        return self.kind == "power"

    @property
    def tabulated(self):
        return self.kind == "log_power"

    def with_weight(self, weight):
        return replace(self, weight=weight)

    def f(self, u):
        u = _finite(u)
        a = np.abs(u)
        s = np.sign(u)
        if self.kind == "power":
            return s * a ** (self.p - 1.0)
        if self.kind == "linear":
            return np.array(u, dtype=float)
        if self.kind == "log_power":
            return self.weight * u * np.log1p(a ** (self.p - 2.0))
        return self.weight * s * _piecewise_f(a, self.p, self.q, self.m_break)

    def F(self, u):
        u = _finite(u)
        a = np.abs(u)
        if self.kind == "power":
            return a ** self.p / self.p
        if self.kind == "linear":
            return 0.5 * a * a
        if self.kind == "log_power":
            return self.weight * _log_table(float(self.p))(a)
        return self.weight * _piecewise_F(a, self.p, self.q, self.m_break)

    def label(self):
        if self.kind == "piecewise_sublinear":
            return f"{self.kind}(p={self.p:g}, q={self.q:g}, M={self.m_break:g})"
        return f"{self.kind}(p={self.p:g}, q={self.q:g})"


def _finite(u):
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise DomainError("nonlinearity evaluated at a non-finite value")
    return u


def _piecewise_f(a, p, q, M):
    e = 0.5 * (q - 2.0)
    scale = M ** e / M ** (p - 1.0)  # M^((q-2)/2) f~(1) / f~(M) with f~(u) = u^(p-1)
    return np.where(a < 1.0, a ** (p - 1.0), np.where(a <= M, a ** e, scale * a ** (p - 1.0)))


def _piecewise_F(a, p, q, M):
    h = 0.5 * q
    scale = M ** (h - 1.0) / M ** (p - 1.0)
    mid_top = 1.0 / p + (M ** h - 1.0) / h
    low = a ** p / p
    mid = 1.0 / p + (np.minimum(a, M) ** h - 1.0) / h
    high = mid_top + scale * (a ** p - M ** p) / p
    return np.where(a < 1.0, low, np.where(a <= M, mid, high))


class _LogPowerTable:
    """Antiderivative of s log(1 + s^a), a = p - 2, for s >= 0 (unit weight).

    Stored as a cubic Hermite spline of log F against log s with exact slopes
    s f(s) / F(s), so the interpolant's derivative tracks f closely.
    """

    STEP = 0.004
    X_MAX = 25.0

    def __init__(self, p):
        a = p - 2.0
        self.a = a
        self.x_min = min(-60.0, -36.0 / a)
        n = int(math.ceil((self.X_MAX - self.x_min) / self.STEP))
        x = np.linspace(self.x_min, self.X_MAX, n + 1)
        nodes, wts = np.polynomial.legendre.leggauss(8)
        left, right = x[:-1], x[1:]
        half = 0.5 * (right - left)
        mid = 0.5 * (right + left)
        xs = mid[:, None] + half[:, None] * nodes[None, :]
        vals = np.exp(2.0 * xs) * np.log1p(np.exp(a * xs))
        pieces = (vals * wts[None, :]).sum(axis=1) * half
        F0 = self._series(math.exp(self.x_min))
        F = F0 + np.concatenate([[0.0], np.cumsum(pieces)])
        slope = np.exp(2.0 * x) * np.log1p(np.exp(a * x)) / F
        self.u_min = math.exp(self.x_min)
        self.u_max = math.exp(self.X_MAX)
        self.F_max = F[-1]
        self.spline = CubicHermiteSpline(x, np.log(F), slope)

    def _series(self, u):
        a = self.a
        u = np.asarray(u, dtype=float)
        y = u ** a
        return u ** (a + 2.0) / (a + 2.0) - u ** (2.0 * a + 2.0) / (2.0 * (2.0 * a + 2.0)) + \
            y * y * u ** (a + 2.0) / (3.0 * (3.0 * a + 2.0))

    def _beyond(self, u):
        a = self.a
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            extra, _ = integrate.quad(lambda s: s * math.log1p(s ** a), self.u_max, float(u), epsrel=1e-13)
        return self.F_max + extra

    def __call__(self, a_abs):
        a_abs = np.asarray(a_abs, dtype=float)
        out = np.zeros_like(a_abs)
        small = (a_abs > 0) & (a_abs < self.u_min)
        mid = (a_abs >= self.u_min) & (a_abs <= self.u_max)
        big = a_abs > self.u_max
        if np.any(small):
            out[small] = self._series(a_abs[small])
        if np.any(mid):
            out[mid] = np.exp(self.spline(np.log(a_abs[mid])))
        if np.any(big):
            out[big] = [self._beyond(v) for v in a_abs[big]]
        return out


@lru_cache(maxsize=16)
def _log_table(p):
    return _LogPowerTable(p)


def quadrature_F(spec: NonlinearitySpec, u: float, weight: float = 1.0) -> float:
    """Adaptive quadrature of f from 0 to u; the independent check on F."""
    s = spec if np.ndim(spec.weight) == 0 else spec.with_weight(weight)
    breaks = [b for b in (1.0, s.m_break) if s.kind == "piecewise_sublinear" and 0 < b < abs(u)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(lambda t: float(s.f(t)), 0.0, abs(u), epsabs=0.0, epsrel=1e-13,
                                limit=400, points=breaks or None)
    return val


# ------------------------------------------------------------------ checkers

@dataclass
class HypothesisReport:
    name: str
    passed: bool
    detail: str = ""
    failing_sample: Optional[float] = None
    value: Optional[float] = None


def sample_points(u_min: float = 1e-4, u_max: float = 1e4, n: int = 4096, spec: NonlinearitySpec = None):
    """Log-spaced positive samples, refined around branch points of the piecewise family."""
    pts = [np.geomspace(u_min, u_max, n)]
    if spec is not None and spec.kind == "piecewise_sublinear":
        d = np.geomspace(1e-12, 1e-1, 64)
        for b in (1.0, spec.m_break):
            pts.append(b * (1.0 + d))
            pts.append(b * (1.0 - d))
            pts.append(np.array([b]))
    pos = np.unique(np.concatenate(pts))
    return pos[(pos >= u_min) & (pos <= u_max)]


def _weights(spec):
    w = np.asarray(spec.weight, dtype=float)
    if w.ndim == 0:
        return [spec]
    return [spec.with_weight(float(w.min())), spec.with_weight(float(w.max()))]


def _signed(samples):
    pos = np.asarray(samples, dtype=float)
    return np.concatenate([-pos[::-1], pos])


def check_f1(spec: NonlinearitySpec, samples, alpha: float, dim: int, C_fit: float = None,
             slack: float = 1e-3) -> HypothesisReport:
    """|f| <= C (|u|^(alpha/N) + |u|^(p-1)); C fitted on samples, checked on a holdout.

    The holdout interleaves the samples and extends one decade past both ends,
    which exposes growth faster than |u|^(p-1).
    """
    pos = np.asarray(samples, dtype=float)
    fit = _signed(pos)
    mids = np.sqrt(pos[1:] * pos[:-1])
    ext = np.concatenate([np.geomspace(pos[0] / 10, pos[0], 16), np.geomspace(pos[-1], pos[-1] * 10, 16)])
    hold = _signed(np.concatenate([mids, ext]))
    e = alpha / dim
    worst_ratio, worst_u, C = 0.0, None, 0.0
    for s in _weights(spec):
        bound = lambda u: np.abs(u) ** e + np.abs(u) ** (spec.p - 1.0)
        c = C_fit if C_fit is not None else float(np.max(np.abs(s.f(fit)) / bound(fit)))
        ratio = np.abs(s.f(hold)) / bound(hold) / c
        i = int(np.argmax(ratio))
        C = max(C, c)
        if ratio[i] > worst_ratio:
            worst_ratio, worst_u = float(ratio[i]), float(hold[i])
    ok = worst_ratio <= 1.0 + slack
    return HypothesisReport("F1", ok, f"C={C:.6g}, holdout max |f|/bound / C = {worst_ratio:.6g}",
                            None if ok else worst_u, C)


def check_f2(spec: NonlinearitySpec, samples, min_slope: float = 0.05) -> HypothesisReport:
    """f(u) = o(u): sup_{|u|<=delta} |f/u| must fall with delta, at a positive log-log rate."""
    pos = np.asarray(samples, dtype=float)
    u = _signed(pos)
    lo, hi = math.log10(pos[0]), math.log10(pos[-1])
    deltas = 10.0 ** np.arange(min(0.0, hi), lo - 1e-12, -1.0)
    deltas = deltas[deltas >= pos[0]]
    if len(deltas) < 2:
        deltas = np.array([pos[-1], pos[0]])
    sups = []
    for s in _weights(spec):
        r = np.abs(s.f(u) / u)
        sups.append([float(np.max(r[np.abs(u) <= d])) for d in deltas])
    sups = np.max(np.array(sups), axis=0)
    nonincreasing = bool(np.all(np.diff(sups) <= 1e-15 * sups[:-1]))
    slope = float(np.polyfit(np.log(deltas), np.log(sups), 1)[0])
    ok = nonincreasing and slope >= min_slope
    return HypothesisReport("F2", ok, f"sup|f/u| over shrinking balls: {sups[0]:.3g} -> {sups[-1]:.3g}, "
                            f"log-log slope {slope:.3f}", None if ok else float(deltas[-1]), slope)


def check_f3(spec: NonlinearitySpec, samples, threshold: float = 1.0, growth: float = 2.0) -> HypothesisReport:
    """F/|u|^(q/2) increasing beyond ``threshold`` and grown by ``growth`` at the sample end."""
    pos = np.asarray(samples, dtype=float)
    tail = pos[pos >= threshold]
    if len(tail) < 2:
        return HypothesisReport("F3", False, "no samples beyond threshold")
    ok, worst, detail = True, None, ""
    for s in _weights(spec):
        for u in (tail, -tail):
            r = s.F(u) / np.abs(u) ** (0.5 * spec.q)
            d = np.diff(r)
            if np.any(d < 0):
                ok, worst = False, float(u[1:][d < 0][0])
            g = r[-1] / r[0]
            detail = f"F/|u|^(q/2) grows by {g:.4g} on [{tail[0]:.3g}, {tail[-1]:.3g}]"
            if not g >= growth:
                ok, worst = False, float(u[-1])
    return HypothesisReport("F3", ok, detail, worst)


def check_nonneg(spec: NonlinearitySpec, samples) -> HypothesisReport:
    u = np.concatenate([_signed(samples), [0.0]])
    for s in _weights(spec):
        F = s.F(u)
        if np.any(F < 0):
            return HypothesisReport("F>=0", False, "negative F", float(u[np.argmin(F)]))
    return HypothesisReport("F>=0", True, "F >= 0 at every sample")


def check_f4(spec: NonlinearitySpec, samples, rtol: float = 1e-12) -> HypothesisReport:
    """u -> f(u) / |u|^((q-2)/2) non-decreasing on each half-line."""
    pos = np.asarray(samples, dtype=float)
    e = 0.5 * (spec.q - 2.0)
    for s in _weights(spec):
        for u in (pos, -pos[::-1]):
            g = s.f(u) / np.abs(u) ** e
            d = np.diff(g)
            bad = d < -rtol * np.maximum(np.abs(g[1:]), np.abs(g[:-1]))
            if np.any(bad):
                return HypothesisReport("F4", False, "decrease found", float(u[1:][bad][0]))
    return HypothesisReport("F4", True, "monotone on both half-lines")


def check_arq(spec: NonlinearitySpec, samples, slack: float = None) -> HypothesisReport:
    """0 <= (q/2) F <= f u; exact for closed forms, 1e-9 relative slack for the tabulated F."""
    if slack is None:
        slack = 1e-9 if spec.tabulated else 0.0
    u = np.concatenate([_signed(samples), [0.0]])
    for s in _weights(spec):
        lhs = 0.5 * spec.q * s.F(u)
        rhs = s.f(u) * u
        if np.any(lhs < 0):
            return HypothesisReport("AR-q", False, "(q/2)F < 0", float(u[np.argmin(lhs)]))
        bad = lhs > rhs * (1.0 + slack)
        if np.any(bad):
            return HypothesisReport("AR-q", False, "(q/2)F > f u", float(u[bad][0]))
    return HypothesisReport("AR-q", True, "0 <= (q/2)F <= f u at every sample")


def feps_constants(spec: NonlinearitySpec, eps: float, samples) -> float:
    """Smallest C with F <= eps u^2 + C |u|^p over the samples."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    u = _signed(samples)
    best = 0.0
    for s in _weights(spec):
        c = (s.F(u) - eps * u * u) / np.abs(u) ** spec.p
        best = max(best, float(np.max(c)))
    return best


def check_feps(spec: NonlinearitySpec, samples, eps_list=(1.0, 0.1, 0.01)) -> HypothesisReport:
    u = _signed(samples)
    for eps in eps_list:
        c = feps_constants(spec, eps, samples)
        for s in _weights(spec):
            if np.any(s.F(u) > (eps * u * u + c * np.abs(u) ** spec.p) * (1 + 1e-12)):
                return HypothesisReport("F-eps", False, f"bound fails for eps={eps}")
    return HypothesisReport("F-eps", True, f"C_eps finite for eps in {tuple(eps_list)}")


def check_all(spec: NonlinearitySpec, alpha: float, dim: int, u_min=1e-4, u_max=1e4, n=4096):
    pts = sample_points(u_min, u_max, n, spec)
    return [
        check_f1(spec, pts, alpha, dim),
        check_f2(spec, pts),
        check_f3(spec, pts),
        check_f4(spec, pts),
        check_nonneg(spec, pts),
        check_arq(spec, pts),
        check_feps(spec, pts),
    ]
