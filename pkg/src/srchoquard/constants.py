"""Closed-form constants of the H^{1/2} setting and their quadrature cross-checks.

All functions are pure; nothing here allocates shared state.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

from scipy import integrate

from .errors import DomainError, NumericError

# Lanczos approximation, g = 7, 9 terms.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


@dataclass(frozen=True)
class ConstantReport:
    name: str
    analytic_value: float
    quadrature_value: Optional[float] = None
    rel_error: Optional[float] = None
    error_estimate: Optional[float] = None


def _sinpi(x: float) -> float:
    # argument reduction is exact in binary floating point for |x| < 2**52
    r = x - 2.0 * round(x / 2.0)  # r in [-1, 1]
    if r > 0.5:
        r = 1.0 - r
    elif r < -0.5:
        r = -1.0 - r
    return math.sin(math.pi * r)


def _gamma_positive(x: float) -> float:
    z = x - 1.0
    s = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        s += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    # split the power so large arguments do not overflow before exp(-t) kicks in
    half = t ** ((z + 0.5) / 2.0)
    return math.sqrt(2.0 * math.pi) * half * (half * math.exp(-t)) * s


def gamma(x: float) -> float:
    """Euler Gamma function for real ``x``, reflection below 1/2."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma: non-finite argument {x!r}")
    if x <= 0.0 and x == math.floor(x):
        raise DomainError(f"gamma: pole at x = {int(x)}")
    if x == math.floor(x) and x <= 30.0:
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        return math.pi / (_sinpi(x) * _gamma_positive(1.0 - x))
    return _gamma_positive(x)


def _check_dim(N: int, minimum: int = 2) -> int:
    if int(N) != N or N < minimum:
        raise DomainError(f"dimension N = {N} must be an integer >= {minimum}")
    return int(N)


def c_n_half(N: int) -> float:
    """Gagliardo normalization C(N,1/2) = Gamma((N+1)/2) / pi^((N+1)/2)."""
    N = _check_dim(N)
    return gamma((N + 1) / 2.0) / math.pi ** ((N + 1) / 2.0)


def sphere_area(k: int) -> float:
    """Surface area omega_k of the unit sphere S^k in R^(k+1)."""
    return 2.0 * math.pi ** ((k + 1) / 2.0) / gamma((k + 1) / 2.0)


def _quad(fun, a, b, tol, limit):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        # QUADPACK refuses relative targets near machine epsilon; the achieved
        # estimate is still compared against the caller's tol afterwards
        epsrel = max(tol, 1e-13)
        val, err, *_ = integrate.quad(fun, a, b, epsabs=0.0, epsrel=epsrel, limit=limit, full_output=1)
    return val, err


def verify_c_n_half(N: int, tol: float = 1e-10, limit: int = 200) -> ConstantReport:
    """Recompute 1/C(N,1/2) by adaptive Gauss-Kronrod quadrature.

    The radial integral over [0, inf) is split at r = 1; the tail is mapped
    onto [0, 1] by r -> 1/s, which turns it into a smooth finite integral.
    """
    N = _check_dim(N)
    if not tol > 0:
        raise DomainError("tol must be positive")
    e = (N + 1) / 2.0
    if N == 2:
        # pi * int_R (1 + eta^2)^(-3/2) d eta, by evenness twice the half line
        head, err_h = _quad(lambda r: (1.0 + r * r) ** -e, 0.0, 1.0, tol, limit)
        tail, err_t = _quad(lambda s: s * (1.0 + s * s) ** -e, 0.0, 1.0, tol, limit)
        prefactor = 2.0 * math.pi
    else:
        head, err_h = _quad(lambda r: r ** (N - 2) * (1.0 + r * r) ** -e, 0.0, 1.0, tol, limit)
        tail, err_t = _quad(lambda s: s * (1.0 + s * s) ** -e, 0.0, 1.0, tol, limit)
        prefactor = math.pi * sphere_area(N - 2)
    value = prefactor * (head + tail)
    estimate = prefactor * (err_h + err_t)
    if estimate > tol * abs(value):
        raise NumericError(
            f"verify_c_n_half(N={N}): error estimate {estimate:.3e} exceeds "
            f"requested {tol:.3e} relative",
            estimate=estimate,
        )
    analytic = 1.0 / c_n_half(N)
    return ConstantReport(
        name=f"1/C({N},1/2)",
        analytic_value=analytic,
        quadrature_value=value,
        rel_error=abs(analytic - value) / abs(analytic),
        error_estimate=estimate,
    )


def hardy_sharp(N: int) -> float:
    """Sharp constant of [u]^2 >= C int u^2/|x|; N = 1 hits the Gamma pole at 0."""
    N = _check_dim(N, minimum=1)
    if N == 1:
        raise DomainError("hardy_sharp: N = 1 puts Gamma((N-1)/4) on its pole at 0")
    g1 = gamma((N + 1) / 4.0)
    g2 = gamma((N - 1) / 4.0)
    return (
        2.0 * math.pi ** (N / 2.0) * g1 * g1 * abs(gamma(-0.5))
        / (g2 * g2 * gamma((N + 1) / 2.0))
    )


def mu_star(N: int) -> float:
    """Largest Coulomb coupling keeping Q_mu coercive: 2 Gamma((N+1)/4)^2 / Gamma((N-1)/4)^2."""
    N = _check_dim(N)
    ratio = gamma((N + 1) / 4.0) / gamma((N - 1) / 4.0)
    value = 2.0 * ratio * ratio
    product = 0.5 * hardy_sharp(N) * c_n_half(N)
    if abs(product - value) > 1e-12 * value:
        raise NumericError(f"mu_star({N}) identity violated: {value!r} vs {product!r}")
    return value


def q_mu_lower_constant(N: int, mu: float) -> float:
    """Coefficient of [u]^2 in the coercivity bound for Q_mu; zero exactly at mu_star."""
    return 0.5 * c_n_half(N) - mu / hardy_sharp(N)


def constants_table(dim_min: int = 2, dim_max: int = 10, verify: bool = False, tol: float = 1e-8):
    rows = []
    for N in range(dim_min, dim_max + 1):
        rel = verify_c_n_half(N, tol=min(tol, 1e-10)).rel_error if verify else float("nan")
        rows.append((N, c_n_half(N), hardy_sharp(N), mu_star(N), rel))
    return rows
