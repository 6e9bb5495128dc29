"""Independent reference computations used only by the tests."""
import math

import mpmath
import numpy as np
from scipy import integrate


def pure_power_t_star(qmu, dd, p):
    """Nehari scaling for F = |u|^p/p, K = 0: t Q_mu = p t^(2p-1) D(u)."""
    return (qmu / (p * dd)) ** (1.0 / (2.0 * p - 2.0))


def gaussian_kinetic_2d(w, m):
    """int sqrt(|xi|^2 + m^2) |u_hat|^2 for u = exp(-|x|^2/(2 w^2)) in R^2, u_hat = w^2 exp(-w^2 xi^2/2)."""
    f = lambda k: math.sqrt(k * k + m * m) * w ** 4 * math.exp(-w * w * k * k) * k
    val, _ = integrate.quad(f, 0.0, np.inf, epsabs=0, epsrel=1e-13, limit=400)
    return 2.0 * math.pi * val


def gaussian_gagliardo_2d(w):
    return 2.0 * math.pi ** 2.5 * w


def epstein_z2_half():
    """Analytic continuation of sum_{n in Z^2 minus 0} |n|^-1, i.e. 4 zeta(1/2) beta(1/2)."""
    beta = mpmath.dirichlet(0.5, [0, 1, 0, -1])
    return float(4 * mpmath.zeta(0.5) * beta)


def brute_gagliardo_2d(grid, u, grad_sq, pad=3, chunk=64):
    """Double sum of |u(x)-u(y)|^2/|x-y|^3 h^4 over x in the box and y in a padded box.

    Corrections: the analytic tail of y outside the padded square, and the
    lattice-sum regularization for the removed diagonal.  ``grad_sq`` is
    |grad u|^2 at the nodes.
    """
    M, h = grid.points, grid.spacing
    Mp = pad * M
    ax = (np.arange(Mp) + 0.5) * h - 0.5 * Mp * h
    big = np.zeros((Mp, Mp))
    off = (Mp - M) // 2
    big[off:off + M, off:off + M] = u
    Y1, Y2 = np.meshgrid(ax, ax, indexing="ij")
    y1, y2, uy = Y1.ravel(), Y2.ravel(), big.ravel()
    X1, X2 = grid.coords
    x1, x2, ux = X1.ravel(), X2.ravel(), u.ravel()
    total = 0.0
    for s in range(0, ux.size, chunk):
        d1 = x1[s:s + chunk, None] - y1[None, :]
        d2 = x2[s:s + chunk, None] - y2[None, :]
        r2 = d1 * d1 + d2 * d2
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(r2 > 0, r2 ** -1.5, 0.0)
        total += float(np.sum((ux[s:s + chunk, None] - uy[None, :]) ** 2 * w))
    total *= h ** 4
    # pairs (x in box, y in padded box) were counted once; (y in pad ring, x in box)
    # belongs to the symmetric half and is added with the tail
    a = 0.5 * Mp * h
    ring = 0.0
    inner = np.zeros((Mp, Mp), dtype=bool)
    inner[off:off + M, off:off + M] = True
    # y in box counts both orders already; y in ring needs its mirror (x in ring, y in box)
    for s in range(0, ux.size, chunk):
        d1 = x1[s:s + chunk, None] - y1[None, ~inner.ravel()]
        d2 = x2[s:s + chunk, None] - y2[None, ~inner.ravel()]
        ring += float(np.sum(ux[s:s + chunk, None] ** 2 * (d1 * d1 + d2 * d2) ** -1.5))
    ring *= h ** 4
    tail = 2.0 * float(np.sum(u * u)) * h * h * 4.0 * math.sqrt(2.0) / a
    diag = -epstein_z2_half() * h * 0.5 * float(np.sum(grad_sq)) * h * h
    return total + ring + tail + diag
