"""Closed-form constants and scalar functions.

Parameters come either as (alpha, beta) in the original weighted form or as
(alpha, p) in logarithmic coordinates; ``p = 6 / (1 - 2 alpha + 2 beta)``.
The half-integer set Lambda = {k - 1/2 : k != 0} is where all sharp
constants vanish.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .sphere_math import log_gamma

LAMBDA_TOL = 1e-12
INFINITY = math.inf


def in_lambda(alpha: float, tol: float = LAMBDA_TOL) -> bool:
    """True when alpha = k - 1/2 for a nonzero integer k."""
    k = round(alpha + 0.5)
    return k != 0 and abs(alpha + 0.5 - k) <= tol


@dataclass(frozen=True)
class ParamPoint:
    """A parameter pair in logarithmic form; ``beta`` is derived."""

    alpha: float
    p: float

    @classmethod
    def from_original(cls, alpha: float, beta: float) -> "ParamPoint":
        return cls(alpha, p_of(alpha, beta))

    @property
    def beta(self) -> float:
        return beta_of(self.alpha, self.p)

    @property
    def degenerate(self) -> bool:
        return in_lambda(self.alpha)


def p_of(alpha: float, beta: float) -> float:
    # a few ulps of slack so that beta_of(alpha, 2) round-trips
    slack = 4.0 * np.finfo(float).eps * max(1.0, abs(alpha))
    if not (alpha - slack <= beta <= alpha + 1 + slack):
        raise ValueError(f"need alpha <= beta <= alpha + 1, got alpha={alpha}, beta={beta}")
    return min(6.0, max(2.0, 6.0 / (1.0 - 2.0 * alpha + 2.0 * beta)))


def beta_of(alpha: float, p: float) -> float:
    if not (2.0 <= p <= 6.0):
        raise ValueError(f"p must lie in [2, 6], got {p}")
    return alpha - 0.5 + 3.0 / p


def reflect(pt: ParamPoint) -> ParamPoint:
    """alpha -> -1 - alpha at fixed p; in original form (a, b) -> (-a-1, b-2a-1)."""
    return ParamPoint(-1.0 - pt.alpha, pt.p)


def reflect_original(alpha: float, beta: float) -> Tuple[float, float]:
    return -alpha - 1.0, beta - 2.0 * alpha - 1.0


def symmetric_mass(alpha: float) -> float:
    """Effective 1D mass lambda(alpha) of the symmetric problem."""
    return (alpha - 0.5) ** 2 if alpha >= -0.5 else (alpha + 1.5) ** 2


def _check_p(p: float) -> None:
    if not p > 2:
        raise ValueError(f"p must exceed 2, got {p}")


def K_gn(lam: float, p: float) -> float:
    """Sharp constant of ||u'||^2 + lam ||u||^2 >= K ||u||_p^2 on the line."""
    _check_p(p)
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    t = 2.0 / (p - 2.0)
    log_inner = (math.log(8.0 * math.sqrt(math.pi)) + log_gamma(t)
                 - math.log(p * p - 4.0) - log_gamma(0.5 + t))
    k1 = 0.5 * p * math.exp((1.0 - 2.0 / p) * log_inner)
    return lam ** (0.5 + 1.0 / p) * k1


def C_star_log(alpha: float, p: float) -> float:
    """Sharp constant among symmetric spinors in logarithmic coordinates.

    The power of (alpha - 1/2) is read as an absolute value, i.e. the
    constant is K_gn(lambda(alpha), p).
    """
    _check_p(p)
    lam = symmetric_mass(alpha)
    if lam == 0.0:
        return 0.0
    return K_gn(lam, p)


def C_star_original(alpha: float, beta: float) -> float:
    p = p_of(alpha, beta)
    if p <= 2.0:
        raise ValueError("p = 2 (beta = alpha + 1): use hardy_constant instead")
    return (4.0 * math.pi) ** ((p - 2.0) / p) * C_star_log(alpha, p)


def u_star(s, alpha: float, p: float):
    """Symmetric optimizer profile (sech-type) for the mass lambda(alpha)."""
    _check_p(p)
    lam = symmetric_mass(alpha)
    if lam == 0.0:
        raise ValueError("alpha in {-3/2, 1/2}: no symmetric optimizer")
    s = np.asarray(s, dtype=float)
    amp = (0.5 * p * lam) ** (1.0 / (p - 2.0))
    width = 0.5 * (p - 2.0) * math.sqrt(lam)
    # cosh^{-2/(p-2)} written via log-cosh to stay finite for large |s|
    x = np.abs(width * s)
    log_cosh = x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)
    return amp * np.exp(-2.0 / (p - 2.0) * log_cosh)


@dataclass(frozen=True)
class SymmetricOptimizer:
    alpha: float
    p: float

    @property
    def lam(self) -> float:
        return symmetric_mass(self.alpha)

    @property
    def type_tag(self) -> str:
        if self.alpha > -0.5:
            return "H0"
        if self.alpha < -0.5:
            return "H-2"
        return "Both"

    @property
    def amplitude(self) -> float:
        return (0.5 * self.p * self.lam) ** (1.0 / (self.p - 2.0))

    @property
    def width(self) -> float:
        return 0.5 * (self.p - 2.0) * math.sqrt(self.lam)

    def profile(self, s):
        return u_star(s, self.alpha, self.p)


def c_lieb_thirring(gamma: float) -> float:
    if not gamma > 0.5:
        raise ValueError(f"gamma must exceed 1/2, got {gamma}")
    g = gamma
    log_val = (-0.5 * math.log(math.pi) - math.log(g - 0.5)
               + log_gamma(g + 1.0) - log_gamma(g + 0.5)
               + (g + 0.5) * math.log((g - 0.5) / (g + 0.5)))
    return math.exp(log_val)


def gamma_of_p(p: float) -> float:
    _check_p(p)
    return 0.5 * (p + 2.0) / (p - 2.0)


def q_of_p(p: float) -> float:
    if not (2.0 < p < 6.0):
        raise ValueError(f"q is finite only for p in (2, 6), got {p}")
    return 2.0 * (p + 2.0) / (6.0 - p)


def _initial_cutoff(alpha: float) -> int:
    return max(64, 4 * math.ceil(abs(alpha)))


def _adaptive_min(term, alpha: float) -> Tuple[float, int]:
    """Minimum of term(k) over k != -1, doubling the |k| cutoff until the
    minimizer sits in the inner half of the window."""
    cutoff = _initial_cutoff(alpha)
    while True:
        ks = np.array([k for k in range(-cutoff, cutoff + 1) if k != -1])
        vals = term(ks.astype(float))
        i = int(np.argmin(vals))
        if abs(ks[i]) <= cutoff // 2:
            return float(vals[i]), int(ks[i])
        cutoff *= 2


def hardy_constant(alpha: float, return_k: bool = False):
    """min over k != -1 of (k - alpha + 1/2)^2."""
    val, k = _adaptive_min(lambda k: (k - alpha + 0.5) ** 2, alpha)
    return (val, k) if return_k else val


def coercivity_eps(alpha: float) -> float:
    val, _ = _adaptive_min(lambda k: (k - alpha + 0.5) ** 2 / (k * (k + 1) + 1), alpha)
    return val


def _check_open_interval(alpha: float) -> None:
    if not (-0.5 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (-1/2, 1), got {alpha}")


def m_alpha(alpha: float) -> float:
    _check_open_interval(alpha)
    return min(1.0 - alpha, 1.0 + 2.0 * alpha)


def q_threshold(alpha: float) -> float:
    _check_open_interval(alpha)
    if alpha < 0:
        return 4.0 - 6.0 / alpha
    if alpha == 0:
        return INFINITY
    return 2.0 + 2.0 / alpha


def funk_hecke_gamma(ell: int, x: float) -> float:
    """Gamma(x) Gamma(l+2-x) / (Gamma(2-x) Gamma(x+l)), in log space."""
    if ell < 0 or int(ell) != ell:
        raise ValueError(f"ell must be a nonnegative integer, got {ell}")
    if not (0.0 < x <= 1.0):
        raise ValueError(f"x must lie in (0, 1], got {x}")
    return math.exp(log_gamma(x) + log_gamma(ell + 2.0 - x)
                    - log_gamma(2.0 - x) - log_gamma(x + ell))


def _zeta_table(ell_max: int, q: float) -> np.ndarray:
    """zeta_1 .. zeta_{ell_max} via the product recurrence of gamma_l.

    gamma_{l+1} = gamma_l ((l+2)q - 2)/(lq + 2), hence
    zeta_{l+1} = zeta_l ((l+2)q - 2)/(lq + 2) + 2/(lq + 2) with zeta_0 = 0.
    This avoids the cancellation in gamma_l - 1 as q -> 2 and makes
    zeta_1 = 1 exact in floating point.
    """
    out = np.empty(ell_max)
    z = 0.0
    for l in range(ell_max):
        d = l * q + 2.0
        z = z * ((l + 2.0) * q - 2.0) / d + 2.0 / d
        out[l] = z
    return out


def zeta(ell: int, q: float) -> float:
    """(gamma_l(2/q) - 1) / (q - 2)."""
    if ell < 1 or int(ell) != ell:
        raise ValueError(f"ell must be a positive integer, got {ell}")
    if not q > 2:
        raise ValueError(f"q must exceed 2, got {q}")
    return float(_zeta_table(int(ell), q)[-1])


def z_plus(ell: int, alpha: float, q: float) -> float:
    return 2.0 * (1.0 - alpha) * zeta(ell, q) / (ell * (ell + 1.0 - 2.0 * alpha))


def z_minus(ell: int, alpha: float, q: float) -> float:
    return 2.0 * (1.0 + 2.0 * alpha) * zeta(ell, q) / ((ell + 1.0) * (ell + 2.0 * alpha))


def recursion_coeffs(sign: str, ell: int, alpha: float, q: float) -> Tuple[float, float]:
    """(a, b) with z_{l+1} = a + b z_l for the chosen branch."""
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    l = float(ell)
    denom_q = l * q + 2.0
    if sign == "+":
        d = (l + 1.0) * (l + 2.0 - 2.0 * alpha) * denom_q
        return (4.0 * (1.0 - alpha) / d,
                l * (l + 1.0 - 2.0 * alpha) * ((l + 2.0) * q - 2.0) / d)
    if sign == "-":
        d = (l + 2.0) * (l + 1.0 + 2.0 * alpha) * denom_q
        return (4.0 * (1.0 + 2.0 * alpha) / d,
                (l + 1.0) * (l + 2.0 * alpha) * ((l + 2.0) * q - 2.0) / d)
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def beckner_B(alpha: float, q: float) -> float:
    """Definitional infimum over both spinor branches.

    The ratios grow like l^{4/q}, so the minimizing l is finite; the cutoff
    is doubled until the minimizer sits in the inner half of the window.
    """
    _check_open_interval(alpha)
    if not q > 2:
        raise ValueError(f"q must exceed 2, got {q}")
    cutoff = _initial_cutoff(alpha)
    while True:
        ells = np.arange(1, cutoff + 1)
        z = _zeta_table(cutoff, q)
        plus = ells * (ells + 1.0 - 2.0 * alpha) / z
        minus = (ells + 1.0) * (ells + 2.0 * alpha) / z
        both = np.minimum(plus, minus)
        arg = int(np.argmin(both))
        if ells[arg] <= cutoff // 2:
            return float(both[arg])
        cutoff *= 2
