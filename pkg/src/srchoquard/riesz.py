"""Riesz-kernel convolution I_alpha * g with I_alpha(x) = |x|^-(N - alpha), and the Hartree term D.

The kernel is sampled at lattice displacements (minimum image per axis),
cut off radially beyond ``cutoff`` (default L/2), and its zero-displacement
value is the cell average of |z|^-(N-alpha).  Both execution paths use the
same samples, so they agree to round-off.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from .errors import DomainError, UsageError
from .nonlinearity import NonlinearitySpec
from .spectral import Grid


def unit_cell_average(dim: int, alpha: float, order: int = 48) -> float:
    """(1/|C|) int_C |z|^-(N-alpha) dz over the unit cube C = [-1/2, 1/2]^N.

    The cube splits into 2N pyramids with apex at 0; the radial factor
    integrates to 1/alpha and the remaining face integral is smooth.
    """
    if not 0 < alpha < dim:
        raise DomainError(f"alpha = {alpha} must lie in (0, N = {dim})")
    if dim == 1:
        return 2.0 * 0.5 ** alpha / alpha
    nodes, wts = np.polynomial.legendre.leggauss(order)
    # face coordinates on [0, 1/2]^(N-1), using evenness of the integrand
    y = 0.25 * (nodes + 1.0)
    w = 0.25 * wts
    grids = np.meshgrid(*([y] * (dim - 1)), indexing="ij")
    weights = np.ones_like(grids[0])
    for ax, g in enumerate(grids):
        sl = [None] * (dim - 1)
        sl[ax] = slice(None)
        weights = weights * w[tuple(sl)]
    r2 = 0.25 + sum(g * g for g in grids)
    face = 2 ** (dim - 1) * float(np.sum(weights * r2 ** (0.5 * (alpha - dim))))
    return 2 * dim * 0.5 * face / alpha


@dataclass(eq=False)
class RieszPlan:
    grid: Grid
    alpha: float
    method: str = "fft_kernel"
    cutoff: float = None
    _spectrum: np.ndarray = field(default=None, init=False, repr=False)

    def __post_init__(self):
        N = self.grid.dim
        if not 0 < self.alpha < N:
            raise DomainError(f"alpha = {self.alpha} must lie in (0, N = {N})")
        if self.method not in ("direct", "fft_kernel"):
            raise UsageError(f"unknown convolution method {self.method!r}")
        if self.cutoff is None:
            self.cutoff = 0.5 * self.grid.box_length
        if self.method == "fft_kernel":
            self._spectrum = np.fft.fftn(self.kernel)

    @property
    def origin_cell_value(self):
        return unit_cell_average(self.grid.dim, self.alpha) * self.grid.spacing ** (self.alpha - self.grid.dim)

    @cached_property
    def kernel(self):
        """Kernel samples indexed by displacement in fft order (index j <-> j h, min image)."""
        g = self.grid
        M = g.points
        j = np.arange(M)
        j = np.where(j < M // 2, j, j - M) * g.spacing
        disp = np.meshgrid(*([j] * g.dim), indexing="ij")
        r = np.sqrt(sum(d * d for d in disp))
        with np.errstate(divide="ignore"):
            k = r ** (self.alpha - g.dim)
        k[(0,) * g.dim] = self.origin_cell_value
        k[r > self.cutoff * (1 + 1e-12)] = 0.0
        return k

    @property
    def kernel_spectrum(self):
        if self._spectrum is None:
            self._spectrum = np.fft.fftn(self.kernel)
        return self._spectrum

    def convolve(self, g_field):
        g_field = self.grid.check(g_field)
        if self.method == "direct":
            return convolve_direct(self, g_field)
        out = np.fft.ifftn(self.kernel_spectrum * np.fft.fftn(g_field)).real
        return out * self.grid.cell_volume

    def with_method(self, method):
        return RieszPlan(self.grid, self.alpha, method, self.cutoff)


def convolve_direct(plan: RieszPlan, g_field):
    """sum_y g(y) k(x - y) h^N by explicit circular shifts; O(M^(2N)) oracle."""
    grid = plan.grid
    k = plan.kernel
    out = np.zeros(grid.shape)
    axes = tuple(range(grid.dim))
    for idx in product(range(grid.points), repeat=grid.dim):
        kv = k[idx]
        if kv != 0.0:
            out += kv * np.roll(g_field, idx, axis=axes)
    return out * grid.cell_volume


def dd_value(plan: RieszPlan, u, nl: NonlinearitySpec) -> float:
    """D(u) = <I_alpha * F(u), F(u)>."""
    Fu = nl.F(u)
    return float(np.sum(plan.convolve(Fu) * Fu) * plan.grid.cell_volume)


def dd_gradient(plan: RieszPlan, u, nl: NonlinearitySpec):
    """L^2 representative of D'(u): 2 (I_alpha * F(u)) f(u)."""
    return 2.0 * plan.convolve(nl.F(u)) * nl.f(u)


def dd_derivative(plan: RieszPlan, u, nl: NonlinearitySpec, phi) -> float:
    phi = plan.grid.check(phi)
    return float(np.sum(dd_gradient(plan, u, nl) * phi) * plan.grid.cell_volume)


@dataclass
class GrowthReport:
    scales: list
    values: list
    small_slope: float = float("nan")
    large_slope: float = float("nan")
    passed: bool = False
    degenerate: bool = False


def hls_growth_probe(plan: RieszPlan, nl: NonlinearitySpec, u, scales, tol: float = 0.1) -> GrowthReport:
    """Log-log slopes of s -> D(s u) at both ends of ``scales``.

    The small-scale slope must be at least 4 and the large-scale slope at most
    2p, the extreme exponents of the HLS growth bound.
    """
    scales = sorted(float(s) for s in scales)
    if np.max(np.abs(u)) == 0 or len(scales) < 2:
        return GrowthReport(scales, [], degenerate=True)
    vals = [dd_value(plan, s * u, nl) for s in scales]
    ls, lv = np.log(scales), np.log(vals)
    small = float((lv[1] - lv[0]) / (ls[1] - ls[0]))
    large = float((lv[-1] - lv[-2]) / (ls[-1] - ls[-2]))
    ok = small >= 4.0 - tol and large <= 2.0 * nl.p + tol
    return GrowthReport(scales, vals, small, large, ok)
