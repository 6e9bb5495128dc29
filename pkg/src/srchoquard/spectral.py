"""Periodic-box grid with its Fourier conventions; the H^{1/2} quadratic forms.

Convention (used by every operator in the package):

* nodes ``x_j = (j + 1/2) h - L/2`` per axis, so no node sits at the origin;
* frequencies ``xi_k = 2 pi k / L`` in ``numpy.fft.fftfreq`` order;
* ``u_hat(xi) = (2 pi)^(-N/2) h^N sum_x u(x) exp(-i xi.x)`` approximates the
  unitary continuum transform, and spectral integrals carry the weight
  ``d xi = (2 pi / L)^N``.  Then ``sum_xi |u_hat|^2 d xi = sum_x |u|^2 h^N``.

Fields are plain ``numpy`` arrays of shape ``grid.shape``.
"""
from __future__ import annotations

import io
import math
import struct
from itertools import permutations, product
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Union

import numpy as np

from .constants import c_n_half
from .errors import NumericError, UsageError

MAGIC = b"SRCQ"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Grid:
    dim: int
    points: int
    box_length: float

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise UsageError(f"grid dimension must be a positive integer, got {self.dim}")
        if int(self.points) != self.points or self.points < 2 or self.points % 2:
            raise UsageError(f"points per axis must be an even integer >= 2, got {self.points}")
        if not self.box_length > 0:
            raise UsageError("box_length must be positive")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "points", int(self.points))
        object.__setattr__(self, "box_length", float(self.box_length))

    @property
    def shape(self):
        return (self.points,) * self.dim

    @property
    def size(self):
        return self.points ** self.dim

    @property
    def spacing(self):
        return self.box_length / self.points

    @property
    def cell_volume(self):
        return self.spacing ** self.dim

    @property
    def dxi(self):
        """Weight of one frequency-lattice cell, (2 pi / L)^N."""
        return (2.0 * math.pi / self.box_length) ** self.dim

    @cached_property
    def axis(self):
        h = self.spacing
        return (np.arange(self.points) + 0.5) * h - 0.5 * self.box_length

    @cached_property
    def coords(self):
        return tuple(np.meshgrid(*([self.axis] * self.dim), indexing="ij"))

    @cached_property
    def radius(self):
        return np.sqrt(sum(c * c for c in self.coords))

    @cached_property
    def freq_axis(self):
        return 2.0 * math.pi * np.fft.fftfreq(self.points, d=self.spacing)

    @cached_property
    def freqs(self):
        return tuple(np.meshgrid(*([self.freq_axis] * self.dim), indexing="ij"))

    @cached_property
    def freq_norm(self):
        # the Nyquist entry is -pi M / L in fftfreq order; |xi| is the same as at +pi M / L
        return np.sqrt(sum(k * k for k in self.freqs))

    @cached_property
    def _phase(self):
        x0 = self.axis[0]
        ph1 = np.exp(-1j * self.freq_axis * x0)
        out = np.ones(self.shape, dtype=complex)
        for ax in range(self.dim):
            sl = [None] * self.dim
            sl[ax] = slice(None)
            out = out * ph1[tuple(sl)]
        return out

    def check(self, u):
        u = np.asarray(u)
        if u.shape != self.shape:
            raise UsageError(f"field shape {u.shape} does not match grid shape {self.shape}")
        return u

    def cells_per_unit(self):
        """Grid cells per unit length if integer, else None (integer shifts not grid-exact)."""
        c = self.points / self.box_length
        return int(round(c)) if abs(c - round(c)) < 1e-12 else None


def forward_transform(grid: Grid, u):
    """Physical-scaled discrete transform; see module docstring for the convention."""
    u = grid.check(u)
    scale = grid.cell_volume / (2.0 * math.pi) ** (grid.dim / 2.0)
    return np.fft.fftn(u) * grid._phase * scale


def inverse_transform(grid: Grid, coeffs, check_real: bool = True):
    coeffs = grid.check(coeffs)
    scale = grid.cell_volume / (2.0 * math.pi) ** (grid.dim / 2.0)
    u = np.fft.ifftn(coeffs / (grid._phase * scale))
    if check_real:
        _real_or_raise(u)
    return u.real


def _real_or_raise(z):
    norm = np.linalg.norm(z.real)
    resid = np.linalg.norm(z.imag)
    if resid > 1e-9 * max(norm, np.finfo(float).tiny):
        raise NumericError(f"imaginary residue {resid:.3e} relative to field norm {norm:.3e}")


def apply_multiplier(grid: Grid, u, symbol):
    out = np.fft.ifftn(symbol * np.fft.fftn(grid.check(u)))
    _real_or_raise(out)
    return out.real


def sqrt_lap_symbol(grid: Grid, m: float):
    return np.sqrt(grid.freq_norm ** 2 + m * m)


def apply_sqrt_lap(grid: Grid, u, m: float):
    """sqrt(-Delta + m^2) u via its Fourier symbol."""
    if m < 0:
        raise UsageError("mass must be non-negative")
    return apply_multiplier(grid, u, sqrt_lap_symbol(grid, m))


def spectral_quadratic(grid: Grid, u, symbol):
    """sum_xi symbol |u_hat|^2 d xi, the discrete int symbol |u_hat|^2."""
    uh = np.fft.fftn(grid.check(u))
    return float(np.sum(symbol * (uh.real ** 2 + uh.imag ** 2)) * grid.cell_volume / grid.size)


def kinetic_quadratic(grid: Grid, u, m: float):
    return spectral_quadratic(grid, u, sqrt_lap_symbol(grid, m))


def gagliardo_sq(grid: Grid, u):
    """[u]^2 = (2 / C(N,1/2)) int |xi| |u_hat|^2."""
    return 2.0 / c_n_half(grid.dim) * spectral_quadratic(grid, u, grid.freq_norm)


def l2_inner(grid: Grid, u, v):
    u = grid.check(u)
    v = grid.check(v)
    return float(np.sum(u * v) * grid.cell_volume)


def lp_norm(grid: Grid, u, t: float = 2.0):
    if t < 1:
        raise UsageError("lp_norm needs t >= 1")
    u = np.abs(grid.check(u))
    if math.isinf(t):
        return float(u.max())
    return float(np.sum(u ** t) * grid.cell_volume) ** (1.0 / t)


def shift(grid: Grid, u, z):
    """Circular translation u(. - z) by a displacement that must be grid-exact."""
    u = grid.check(u)
    z = np.broadcast_to(np.asarray(z, dtype=float), (grid.dim,))
    cells = z / grid.spacing
    icells = np.rint(cells)
    if np.any(np.abs(cells - icells) > 1e-9):
        raise UsageError(f"shift {tuple(z)} is not a multiple of the spacing {grid.spacing}")
    return np.roll(u, tuple(int(c) for c in icells), axis=tuple(range(grid.dim)))


def band_limited_random(grid: Grid, rng, kmax: float, envelope: float = None, symmetric: bool = False):
    """Random real field with spectrum supported on |xi| <= kmax.

    ``envelope`` optionally multiplies by a Gaussian window of that width
    (the result is then only approximately band limited).
    """
    shape = grid.shape
    noise = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    noise[grid.freq_norm > kmax] = 0.0
    u = np.fft.ifftn(noise).real
    if envelope is not None:
        u = u * np.exp(-(grid.radius / envelope) ** 2)
    if symmetric:
        u = symmetrize(grid, u)
    return u / np.max(np.abs(u))


def _reflection_index(grid: Grid, centre):
    """Index maps i -> (2c - i) mod M reflecting about the point ``centre`` (per axis).

    ``centre`` must be a node or a cell corner; the origin (default) is a corner.
    """
    M, h = grid.points, grid.spacing
    c = np.zeros(grid.dim) if centre is None else np.broadcast_to(np.asarray(centre, float), (grid.dim,))
    # position x = (i + 1/2) h - L/2, so 2c_index = 2 x_c / h + M - 1
    two_c = 2.0 * c / h + M - 1
    k = np.rint(two_c)
    if np.any(np.abs(two_c - k) > 1e-9):
        raise UsageError(f"symmetry centre {tuple(c)} is neither a node nor a cell corner")
    return [(int(kk) - np.arange(M)) % M for kk in k]


def symmetry_images(grid: Grid, u, centre=None):
    """All images of u under the hyperoctahedral group about ``centre`` (default the origin)."""
    u = grid.check(u)
    idx = _reflection_index(grid, centre)
    if centre is not None and np.ptp(np.asarray(centre, float)) != 0:
        raise UsageError("axis permutations need a centre with equal coordinates")
    for perm in permutations(range(grid.dim)):
        v = np.transpose(u, perm)
        for flips in product((False, True), repeat=grid.dim):
            w = v
            for ax, f in enumerate(flips):
                if f:
                    w = np.take(w, idx[ax], axis=ax)
            yield w


def symmetrize(grid: Grid, u, centre=None):
    images = list(symmetry_images(grid, u, centre))
    return sum(images) / len(images)


def symmetry_defect(grid: Grid, u, centre=None):
    """max_g max|u o g - u| / max|u| over the hyperoctahedral group about ``centre``."""
    scale = np.max(np.abs(u))
    if scale == 0:
        return 0.0
    return max(float(np.max(np.abs(v - u))) for v in symmetry_images(grid, u, centre)) / scale


# ---------------------------------------------------------------- field I/O

def write_field(path: Union[str, Path, io.BufferedIOBase], grid: Grid, u):
    """Binary dump: b'SRCQ', u32 version, u32 N, u32 M, f64 L, then M^N f64 row-major."""
    u = np.ascontiguousarray(grid.check(u), dtype="<f8")
    header = MAGIC + struct.pack("<IIId", FORMAT_VERSION, grid.dim, grid.points, grid.box_length)
    if hasattr(path, "write"):
        path.write(header)
        path.write(u.tobytes(order="C"))
        return
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(u.tobytes(order="C"))


def read_field(path):
    data = path.read() if hasattr(path, "read") else Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise UsageError("not an SRCQ field file (bad magic)")
    version, dim, points, box_length = struct.unpack("<IIId", data[4:24])
    if version != FORMAT_VERSION:
        raise UsageError(f"unsupported SRCQ version {version}")
    grid = Grid(dim, points, box_length)
    payload = data[24:]
    if len(payload) != 8 * grid.size:
        raise UsageError(f"SRCQ payload has {len(payload)} bytes, expected {8 * grid.size}")
    u = np.frombuffer(payload, dtype="<f8").reshape(grid.shape).astype(float)
    return grid, u


def write_field_csv(path, grid: Grid, u):
    u = grid.check(u)
    cols = [c.ravel() for c in grid.coords] + [u.ravel()]
    header = ",".join([f"x{i + 1}" for i in range(grid.dim)] + ["u"])
    np.savetxt(path, np.column_stack(cols), delimiter=",", header=header, comments="", fmt="%.17g")
