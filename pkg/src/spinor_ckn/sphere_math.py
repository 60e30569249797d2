"""Special functions and quadrature on the unit sphere S^2.

Spherical harmonics here are normalized against the uniform *probability*
measure dw = sin(theta) dtheta dphi / (4 pi), so that the integral of
|Y_l^m|^2 dw is 1 and Y_0^0 == 1.  The Condon-Shortley phase is used, which
gives conj(Y_l^m) = (-1)^m Y_l^{-m} and the standard ladder coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

L_MAX = 64


@dataclass(frozen=True)
class HarmonicIndex:
    ell: int
    m: int

    def __post_init__(self):
        if int(self.ell) != self.ell or int(self.m) != self.m:
            raise ValueError(f"harmonic index must be integral, got ({self.ell}, {self.m})")
        if self.ell < 0 or abs(self.m) > self.ell:
            raise ValueError(f"invalid harmonic index (ell={self.ell}, m={self.m})")
        if self.ell > L_MAX:
            raise ValueError(f"ell={self.ell} exceeds supported maximum {L_MAX}")


@dataclass(frozen=True)
class Direction:
    theta: float
    phi: float

    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


@dataclass(frozen=True)
class QuadratureGrid:
    """Product Gauss-Legendre (in cos theta) x uniform (in phi) rule.

    ``theta``, ``phi`` and ``weights`` are flat arrays of equal length; the
    weights sum to one.
    """

    n_theta: int
    n_phi: int
    theta: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def nodes(self):
        return [(Direction(float(t), float(p)), float(w))
                for t, p, w in zip(self.theta, self.phi, self.weights)]

    def unit_vectors(self) -> np.ndarray:
        """Array of shape (3, size) holding the node directions."""
        st = np.sin(self.theta)
        return np.stack([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _legendre_column(ell: int, m: int, x: np.ndarray) -> np.ndarray:
    """Normalized associated Legendre function for m >= 0 (dw convention).

    Seeds at P_m^m and runs the three-term recurrence upward in ell.  The
    seed is built as a running product so no factorial is ever formed.
    """
    sint = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    pmm = np.ones_like(x)
    for i in range(1, m + 1):
        pmm = pmm * (-math.sqrt((2 * i - 1) / (2 * i))) * sint
    pmm = pmm * math.sqrt(2 * m + 1)
    if ell == m:
        return pmm
    p_prev = pmm
    p_cur = math.sqrt(2 * m + 3) * x * pmm
    for l in range(m + 2, ell + 1):
        a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
        b = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
        p_prev, p_cur = p_cur, a * (x * p_cur - b * p_prev)
    return p_cur


def sph_harm_array(ell: int, m: int, theta, phi) -> np.ndarray:
    """Vectorized Y_l^m(theta, phi) in the dw normalization."""
    HarmonicIndex(ell, m)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    mm = abs(m)
    plm = _legendre_column(ell, mm, np.cos(theta))
    y = plm * np.exp(1j * mm * phi)
    if m < 0:
        y = (-1) ** mm * np.conj(y)
    return y


def sph_harm(idx: HarmonicIndex, direction: Direction) -> complex:
    return complex(sph_harm_array(idx.ell, idx.m, direction.theta, direction.phi))


def ladder_apply(op_kind: str, idx: HarmonicIndex) -> Tuple[float, Optional[HarmonicIndex]]:
    """Exact action of L3 or L1 +- iL2 on Y_l^m.

    Returns ``(coefficient, new_index)``; ``new_index`` is None when the
    result vanishes.
    """
    l, m = idx.ell, idx.m
    if op_kind == "L3":
        return float(m), idx
    if op_kind == "Lplus":
        if m + 1 > l:
            return 0.0, None
        return math.sqrt((l + m + 1) * (l - m)), HarmonicIndex(l, m + 1)
    if op_kind == "Lminus":
        if m - 1 < -l:
            return 0.0, None
        return math.sqrt((l - m + 1) * (l + m)), HarmonicIndex(l, m - 1)
    raise ValueError(f"unknown ladder operator {op_kind!r}")


def ladder_coefficient_squared(op_kind: str, ell: int, m: int) -> int:
    """Squared ladder coefficient as an exact integer."""
    if op_kind == "Lplus":
        return (ell + m + 1) * (ell - m) if m + 1 <= ell else 0
    if op_kind == "Lminus":
        return (ell - m + 1) * (ell + m) if m - 1 >= -ell else 0
    raise ValueError(f"unknown ladder operator {op_kind!r}")


def make_grid(n_theta: int, n_phi: int) -> QuadratureGrid:
    if n_theta < 1 or n_phi < 1:
        raise ValueError(f"grid sizes must be positive, got ({n_theta}, {n_phi})")
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    ww = np.outer(wx / 2.0, np.full(n_phi, 1.0 / n_phi))
    return QuadratureGrid(n_theta, n_phi, tt.ravel(), pp.ravel(), ww.ravel())


def integrate(grid: QuadratureGrid, f: Callable) -> complex:
    """Sum of w_i f(theta_i, phi_i).

    ``f`` is called once with the node arrays and must broadcast; an
    already-sampled array of node values is accepted as well.
    """
    values = f(grid.theta, grid.phi) if callable(f) else f
    values = np.broadcast_to(np.asarray(values), grid.weights.shape)
    return complex(np.sum(grid.weights * values))
