"""Exact and numerically integrated triangle (and quadrangle) probabilities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

SQRT2 = math.sqrt(2.0)
P3_UNIFORM = 2.0 - math.pi ** 2 / 6.0


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class AnalyticValue:
    value: float
    form: str              # "closed_form", "series" or "quadrature"
    error_bound: float = 0.0

    def __post_init__(self):
        if self.error_bound < 0:
            raise ValueError("error bound must be non-negative")

    def __float__(self):
        return self.value


def p3_g3(p: float, q: float) -> AnalyticValue:
    """Triangle probability for weights p, q, 1-p-q on the directions 0, pi/3, 2pi/3."""
    if not (0.0 < p and 0.0 < q and p + q < 1.0):
        raise DomainError(f"need 0<p, 0<q, p+q<1; got p={p}, q={q}")
    r = 1.0 - p - q
    return AnalyticValue(2.0 * p * q * r / (p + q - p * p - q * q - p * q), "closed_form")


def p3_g3_gradient(p: float, q: float):
    """Gradient of :func:`p3_g3` by the quotient rule."""
    r = 1.0 - p - q
    num = 2.0 * p * q * r
    den = p + q - p * p - q * q - p * q
    dnum = (2.0 * q * (r - p), 2.0 * p * (r - q))
    dden = (1.0 - 2.0 * p - q, 1.0 - 2.0 * q - p)
    return tuple((a * den - num * b) / den ** 2 for a, b in zip(dnum, dden))


def argmax_p3_g3(grid: int = 200, xtol: float = 1e-10):
    """Maximise the three-direction triangle probability over the open simplex.

    A coarse grid locates the basin, Nelder-Mead polishes it.
    """
    t = (np.arange(grid) + 0.5) / grid
    p, q = np.meshgrid(t, t, indexing="ij")
    ok = p + q < 1.0
    r = 1.0 - p - q
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(ok, 2 * p * q * r / (p + q - p * p - q * q - p * q), -np.inf)
    i, j = np.unravel_index(np.argmax(f), f.shape)

    def neg(x):
        a, b = x
        if a <= 0 or b <= 0 or a + b >= 1:
            return 1.0
        return -p3_g3(a, b).value

    res = minimize(neg, x0=[t[i], t[j]], method="Nelder-Mead",
                   options={"xatol": xtol, "fatol": 1e-16, "maxiter": 10_000})
    return float(res.x[0]), float(res.x[1])


def p3_g4(p: float, q: float, r: float) -> AnalyticValue:
    """Triangle probability for weights p, q, r, 1-p-q-r on the directions l*pi/4."""
    if not (p > 0 and q > 0 and r > 0 and p + q + r < 1.0):
        raise DomainError(f"need 0<p,q,r and p+q+r<1; got {p}, {q}, {r}")
    s = SQRT2
    u = 1.0 - p - q - r
    lead = 2.0 * p / (s * p + 2 * q + s * r - s * p * p - 2 * q * q - s * r * r - 2 * p * q
                      + (2 - 2 * s) * p * r - 2 * q * r)
    bracket = (3 * q * r / (2 + p * (-2 + s) - q + r * (-2 + s))
               + 3 * s * q * u / (2 + (-2 + s) * p + r * (-2 + 2 * s))
               + 2 * r * s * u / (s + p * (2 - s) + s * q + r * (2 - s)))
    return AnalyticValue(lead * bracket, "closed_form")


def sigma_k(k: int, i: int) -> int:
    """Number of atoms l*pi/k (l = 0..k-1) lying below pi - i*pi/k."""
    if k < 3 or not 1 <= i <= k - 2:
        raise DomainError(f"need k>=3 and 1<=i<=k-2; got k={k}, i={i}")
    return k - i


def _sine_ratio(a, b, c):
    return a * b * c / (a + b + c)


@lru_cache(maxsize=None)
def _gk_sum(k: int) -> float:
    i = np.arange(1, k - 1)[:, None]
    j = np.arange(1, k - 1)[None, :]
    mask = j <= k - i - 1
    si = np.sin(i * math.pi / k)
    sj = np.sin(j * math.pi / k)
    sij = np.sin((i + j) * math.pi / k)
    with np.errstate(invalid="ignore"):
        terms = np.where(mask, _sine_ratio(si, sj, sij), 0.0)
    inner = terms.sum(axis=1)
    return float(((k - i[:, 0]) * inner).sum())


def p3_gk(k: int) -> AnalyticValue:
    """Triangle probability for k equally weighted, equally spread directions."""
    if int(k) != k or k < 3:
        raise DomainError(f"need an integer k >= 3; got {k}")
    k = int(k)
    value = 4.0 / k * math.tan(math.pi / (2 * k)) ** 2 * _gk_sum(k)
    return AnalyticValue(value, "series")


P3_GK_CLOSED = {
    3: 2.0 / 9.0,
    4: 4.0 * (5.0 * SQRT2 - 7.0),
    5: 32.0 / math.sqrt(5.0) - 14.0,
    6: 4.0 / 3.0 * (70.0 * math.sqrt(3.0) - 121.0),
}


def p3_uniform() -> AnalyticValue:
    return AnalyticValue(P3_UNIFORM, "closed_form")


def zeta3(tail: float = 1e-14) -> float:
    """Sum of 1/i^3, stopped once the remainder bound 1/(2N^2) is below ``tail``."""
    n = int(math.ceil(math.sqrt(1.0 / (2.0 * tail))))
    return zeta3_partial(n, tail_corrected=False)


def zeta3_partial(n: int, tail_corrected: bool = True) -> float:
    """First ``n`` terms of the zeta(3) series, optionally plus the 1/(2n^2) tail estimate."""
    i = np.arange(n, 0, -1, dtype=float)  # smallest terms first
    total = float(np.sum(1.0 / i ** 3))
    return total + 1.0 / (2.0 * n * n) if tail_corrected else total


def p4_uniform(terms: int = None) -> AnalyticValue:
    """Quadrangle probability of the isotropic tessellation (closed form in zeta(3)).

    By default zeta(3) is summed until the tail bound drops below 1e-14;
    with ``terms`` the tail-corrected partial sum of that length is used.
    """
    if terms is None:
        z = zeta3()
        err = 3.5 * 1e-14
    else:
        z = zeta3_partial(terms)
        err = 3.5 / (2.0 * terms ** 3)
    pi2 = math.pi ** 2
    value = pi2 * math.log(2.0) - 1.0 / 3.0 - 7.0 * pi2 / 36.0 - 3.5 * z
    return AnalyticValue(value, "series", err)


# --- quadrature ---------------------------------------------------------------------

@lru_cache(maxsize=None)
def _gauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def limit_integrand(t, s):
    """sin(pi t) sin(pi s) sin(pi(t+s)) / (sin(pi t) + sin(pi s) + sin(pi(t+s)))."""
    a, b, c = np.sin(math.pi * t), np.sin(math.pi * s), np.sin(math.pi * (t + s))
    den = a + b + c
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den > 0, a * b * c / np.where(den > 0, den, 1.0), 0.0)


def _limit_rule(n: int) -> float:
    x, w = _gauss(n)
    t = x[:, None]
    u = x[None, :]
    s = (1.0 - t) * u
    f = (1.0 - t) * (1.0 - t) * limit_integrand(t, s)   # ds = (1 - t) du
    return math.pi ** 2 * float(w @ f @ w)


def limit_integral(grid: int = 256) -> AnalyticValue:
    """pi^2 * int_0^1 (1-t) int_0^{1-t} limit_integrand(t, s) ds dt.

    Tensor Gauss-Legendre on the unit square after ``s = (1 - t) u``; the error
    bound is the change from the rule with half as many nodes.
    """
    if grid < 16:
        raise DomainError("grid must be at least 16")
    value = _limit_rule(grid)
    return AnalyticValue(value, "quadrature", abs(value - _limit_rule(grid // 2)))


def iso_double_integrand(phi1, phi2):
    s1, s2, s12 = np.sin(phi1), np.sin(phi2), np.sin(phi1 - phi2)
    den = s2 - s1 - s12
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(den < 0, s1 * s2 * s12 / np.where(den < 0, den, -1.0), 0.0)
    return (math.pi - phi1) / math.pi * ratio


def _iso_double_rule(n: int) -> float:
    x, w = _gauss(n)
    phi1 = math.pi * x[:, None]
    # phi2 runs over [phi1 - pi, 0]
    width = math.pi - phi1
    phi2 = (phi1 - math.pi) + width * x[None, :]
    f = iso_double_integrand(phi1, phi2) * width
    return math.pi * float(w @ f @ w)


def iso_single_integrand(phi):
    return (math.pi - phi) * (2.0 * np.sin(phi) - (math.pi - phi) * (1.0 - np.cos(phi))) / (2.0 * math.pi)


def _iso_single_rule(n: int) -> float:
    x, w = _gauss(n)
    return math.pi * float(w @ iso_single_integrand(math.pi * x))


def iso_integral_reduction_check(grid: int = 256):
    """Evaluate the isotropic triangle probability both as the double integral over
    (phi1, phi2) and as the reduced single integral; returns two AnalyticValues."""
    if grid < 16:
        raise DomainError("grid must be at least 16")
    d = _iso_double_rule(grid)
    s = _iso_single_rule(grid)
    return (AnalyticValue(d, "quadrature", abs(d - _iso_double_rule(grid // 2))),
            AnalyticValue(s, "quadrature", abs(s - _iso_single_rule(grid // 2))))


def tan_factor(k: int) -> float:
    """4 k^2 tan^2(pi / 2k), which tends to pi^2."""
    return 4.0 * k * k * math.tan(math.pi / (2 * k)) ** 2


def _t_function(phi0, phi1, phi2):
    s1, s2, s12 = np.sin(phi1), np.sin(phi2), np.sin(np.subtract(phi1, phi2))
    den = s1 + s2 + s12
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.sin(np.subtract(phi0, phi1)) * s1 * s2 * s12 / den
    return t


def _indicator(phi0, phi1, phi2):
    return (np.asarray(phi0) < math.pi - np.asarray(phi1)) & (np.asarray(phi1) < np.asarray(phi2))


def fk_integrand(k: int, phi0, phi1, phi2):
    ind = _indicator(phi0, phi1, phi2)
    out = np.where(ind, tan_factor(k) * np.where(ind, _t_function(phi0, phi1, phi2), 0.0), 0.0)
    return float(out) if out.ndim == 0 else out


def f_limit_integrand(phi0, phi1, phi2):
    ind = _indicator(phi0, phi1, phi2)
    out = np.where(ind, math.pi ** 2 * np.where(ind, _t_function(phi0, phi1, phi2), 0.0), 0.0)
    return float(out) if out.ndim == 0 else out


def p3_discrete(g) -> AnalyticValue:
    """Triangle probability of any discrete directional law by exact enumeration.

    Sums over (lower pair, third edge) atom configurations that close into a
    triangle.  With z1 ~ Exp(lambda1) and the survival exponent linear in z1,
    the expected weight of a configuration is lambda1 / (lambda1 + c).
    """
    ii, jj, p_pair = g.pair_table
    shifted, p_third = g.phi2_table
    theta, lam = g._theta, g.atom_lambdas
    total = 0.0
    for i0, i1, pp in zip(ii, jj, p_pair):
        phi0, phi1 = theta[i0], theta[i1]
        phi2 = shifted[i1]
        tri = (phi2 < phi0) & (p_third[i1] > 0)
        if not tri.any():
            continue
        den = np.sin(phi0 - phi2[tri])
        a = np.sin(phi1 - phi0) / den
        b = np.sin(phi1 - phi2[tri]) / den
        c = 0.5 * (lam[tri] * a + lam[i0] * b - lam[i1])
        total += pp * float(p_third[i1][tri] @ (lam[i1] / (lam[i1] + c)))
    return AnalyticValue(total, "series")
