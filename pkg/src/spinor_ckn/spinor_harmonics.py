"""Spinor spherical harmonics and the spin-orbit operator sigma.L on S^2.

A mode (k, m) labels the joint eigenfunction chi_k^m of sigma.L (eigenvalue
k, an integer != -1) and J_3 (eigenvalue m, a half-integer).  Half-integers
are stored as twice their value (``m2``) so membership tests are exact.

Spinor-valued functions on the sphere are represented either as sparse
coefficient maps over modes, or in the scalar harmonic basis as a pair of
maps ``(up, down)`` from :class:`HarmonicIndex` to complex coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Tuple

import numpy as np

from .sphere_math import (
    Direction,
    HarmonicIndex,
    QuadratureGrid,
    ladder_apply,
    sph_harm_array,
)

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
IDENTITY2 = np.eye(2, dtype=complex)

# 2x2 complex array; Hermitian and traceless when built from a real vector.
PauliMatrix = np.ndarray

# Spinor in the scalar-harmonic basis: (upper component, lower component).
HarmonicSpinor = Tuple[Dict[HarmonicIndex, complex], Dict[HarmonicIndex, complex]]


@dataclass(frozen=True)
class Spinor2:
    up: complex
    down: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.up, self.down], dtype=complex)

    def norm2(self) -> float:
        return abs(self.up) ** 2 + abs(self.down) ** 2


@dataclass(frozen=True, order=True)
class AngularMode:
    k: int
    m2: int

    def __post_init__(self):
        k, m2 = self.k, self.m2
        if int(k) != k or int(m2) != m2 or m2 % 2 == 0:
            raise ValueError(f"invalid mode k={k}, 2m={m2}: m must be a half-integer")
        if k == -1:
            raise ValueError("k = -1 is not an eigenvalue of sigma.L")
        if k >= 0 and abs(m2) > 2 * k + 1:
            raise ValueError(f"m={m2}/2 not in M_{k}")
        if k <= -2 and abs(m2) > -2 * k - 3:
            raise ValueError(f"m={m2}/2 not in M_{k}")

    @classmethod
    def of(cls, k: int, m) -> "AngularMode":
        """Build from a half-integer ``m`` given as float, Fraction or str."""
        m2 = Fraction(m) * 2
        if m2.denominator != 1:
            raise ValueError(f"m={m} is not a half-integer")
        return cls(int(k), int(m2))

    @property
    def m(self) -> float:
        return self.m2 / 2

    @property
    def ell(self) -> int:
        return self.k if self.k >= 0 else -self.k - 1

    def __str__(self) -> str:
        return f"({self.k},{self.m2}/2)"


def modes_for_k(k: int) -> List[AngularMode]:
    """All legal modes of H_k, ordered by increasing m."""
    if k == -1:
        raise ValueError("k = -1 is not an eigenvalue of sigma.L")
    top = 2 * k + 1 if k >= 0 else -2 * k - 3
    return [AngularMode(k, m2) for m2 in range(-top, top + 1, 2)]


def truncated_modes(k_max: int) -> List[AngularMode]:
    """Modes with |k+1| <= k_max, ordered by k then m."""
    ks = [k for k in range(-k_max - 1, k_max) if k != -1]
    return [mode for k in ks for mode in modes_for_k(k)]


@dataclass(frozen=True)
class AngularSpinorField:
    """Finite superposition of spinor harmonics, keyed by mode."""

    coefficients: Dict[AngularMode, complex]

    def norm2(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.coefficients.values()))

    def samples(self, grid: QuadratureGrid) -> np.ndarray:
        """Dense values on the grid nodes, shape (2, grid.size)."""
        out = np.zeros((2, grid.size), dtype=complex)
        for mode, c in self.coefficients.items():
            out += c * chi_array(mode, grid.theta, grid.phi)
        return out


def pauli_dot(v) -> PauliMatrix:
    v = np.asarray(v)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    return np.einsum("j,jab->ab", v, SIGMA)


def chi_components(mode: AngularMode) -> List[Tuple[int, HarmonicIndex, float]]:
    """Expansion of chi_k^m in scalar harmonics.

    Returns ``(component, index, coefficient)`` triples, component 0 being
    the upper entry.  With Y normalized against dw the sqrt(4 pi) prefactor
    of the surface-measure formula is absent.
    """
    k, m2 = mode.k, mode.m2
    mu = (m2 - 1) // 2  # m - 1/2
    ell = mode.ell
    out = []
    if k >= 0:
        norm = math.sqrt(2 * k + 1)
        c_up = math.sqrt(k + mu + 1) / norm
        c_dn = math.sqrt(k - mu) / norm
    else:
        norm = math.sqrt(-2 * k - 1)
        c_up = math.sqrt(ell - mu) / norm
        c_dn = -math.sqrt(ell + mu + 1) / norm
    if c_up != 0.0:
        out.append((0, HarmonicIndex(ell, mu), c_up))
    if c_dn != 0.0:
        out.append((1, HarmonicIndex(ell, mu + 1), c_dn))
    return out


def chi_harmonic(mode: AngularMode) -> HarmonicSpinor:
    up: Dict[HarmonicIndex, complex] = {}
    down: Dict[HarmonicIndex, complex] = {}
    for comp, idx, c in chi_components(mode):
        (up if comp == 0 else down)[idx] = complex(c)
    return up, down


def chi_array(mode: AngularMode, theta, phi) -> np.ndarray:
    """chi_k^m sampled at broadcast (theta, phi); shape (2, *theta.shape)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    shape = np.broadcast(theta, phi).shape
    out = np.zeros((2,) + shape, dtype=complex)
    for comp, idx, c in chi_components(mode):
        out[comp] += c * sph_harm_array(idx.ell, idx.m, theta, phi)
    return out


def chi(mode: AngularMode, direction: Direction) -> Spinor2:
    v = chi_array(mode, direction.theta, direction.phi)
    return Spinor2(complex(v[0]), complex(v[1]))


def chi_matrix(modes: Iterable[AngularMode], grid: QuadratureGrid) -> np.ndarray:
    """All modes sampled on a grid; shape (n_modes, 2, grid.size)."""
    return np.stack([chi_array(md, grid.theta, grid.phi) for md in modes])


# -- operators on sparse mode-coefficient fields -----------------------------

def apply_sigma_L(field: AngularSpinorField) -> AngularSpinorField:
    """sigma.L is diagonal in the chi basis with eigenvalue k."""
    return AngularSpinorField({mode: mode.k * c for mode, c in field.coefficients.items()})


# -- operators on spinors in the scalar-harmonic basis -----------------------

def _accumulate(target: Dict[HarmonicIndex, complex], idx, value: complex) -> None:
    if idx is None or value == 0:
        return
    target[idx] = target.get(idx, 0.0) + value


def _apply_scalar(op_kind: str, comp: Dict[HarmonicIndex, complex]) -> Dict[HarmonicIndex, complex]:
    out: Dict[HarmonicIndex, complex] = {}
    for idx, c in comp.items():
        coef, new = ladder_apply(op_kind, idx)
        _accumulate(out, new, coef * c)
    return out


def _combine(*terms) -> Dict[HarmonicIndex, complex]:
    out: Dict[HarmonicIndex, complex] = {}
    for scale, comp in terms:
        for idx, c in comp.items():
            _accumulate(out, idx, scale * c)
    return out


def apply_sigma_L_pointwise(components: HarmonicSpinor) -> HarmonicSpinor:
    """sigma.L = [[L3, L-], [L+, -L3]] applied through the ladder formulas."""
    up, down = components
    new_up = _combine((1, _apply_scalar("L3", up)), (1, _apply_scalar("Lminus", down)))
    new_down = _combine((1, _apply_scalar("Lplus", up)), (-1, _apply_scalar("L3", down)))
    return new_up, new_down


def apply_L_squared(components: HarmonicSpinor) -> HarmonicSpinor:
    """L^2 = L- L+ + L3^2 + L3, componentwise."""
    def l2(comp):
        return _combine(
            (1, _apply_scalar("Lminus", _apply_scalar("Lplus", comp))),
            (1, _apply_scalar("L3", _apply_scalar("L3", comp))),
            (1, _apply_scalar("L3", comp)),
        )
    up, down = components
    return l2(up), l2(down)


def apply_J3(components: HarmonicSpinor) -> HarmonicSpinor:
    up, down = components
    return (_combine((1, _apply_scalar("L3", up)), (0.5, up)),
            _combine((1, _apply_scalar("L3", down)), (-0.5, down)))


def apply_J_squared(components: HarmonicSpinor) -> HarmonicSpinor:
    """J^2 = L^2 + sigma.L + 3/4."""
    l2 = apply_L_squared(components)
    sl = apply_sigma_L_pointwise(components)
    return tuple(_combine((1, a), (1, b), (0.75, c)) for a, b, c in zip(l2, sl, components))


def harmonic_distance(a: HarmonicSpinor, b: HarmonicSpinor, scale_b: complex = 1.0) -> float:
    """max |a - scale_b * b| over all coefficients."""
    worst = 0.0
    for ca, cb in zip(a, b):
        for idx in set(ca) | set(cb):
            worst = max(worst, abs(ca.get(idx, 0.0) - scale_b * cb.get(idx, 0.0)))
    return worst


# -- projections and overlaps -------------------------------------------------

def project_mode(samples, mode: AngularMode, grid: QuadratureGrid) -> complex:
    """Integral of <chi_k^m(w), psi(w)> dw by quadrature.

    ``samples`` is a callable ``(theta, phi) -> array (2, N)`` or the
    already-sampled (2, N) array.
    """
    values = samples(grid.theta, grid.phi) if callable(samples) else samples
    values = np.asarray(values)
    basis = chi_array(mode, grid.theta, grid.phi)
    return complex(np.sum(grid.weights * np.sum(np.conj(basis) * values, axis=0)))


def delta_coeff(mode: AngularMode) -> float:
    """Closed form of the overlap coefficient delta_k^m with chi_0 = (1, 0)."""
    k = mode.k
    if k in (-1, 0):
        raise ValueError("delta_k^m is defined for k not in {-1, 0}")
    if mode.m2 == 1:
        return (k + 1) / (2 * k + 1)
    return 0.5 * (k + mode.m + 0.5) / (2 * k + 1)


def delta_coeff_quadrature(mode: AngularMode, grid: QuadratureGrid) -> float:
    """Quadrature value of the integral of |Re<chi_0, chi_k^m>|^2 dw."""
    up = chi_array(mode, grid.theta, grid.phi)[0]
    return float(np.sum(grid.weights * up.real ** 2))


def sigma_omega_matrix(modes: List[AngularMode], grid: QuadratureGrid) -> np.ndarray:
    """Gram matrix S_ab = integral of <chi_a, (sigma.w) chi_b> dw."""
    basis = chi_matrix(modes, grid)
    sw = np.einsum("jn,jab->nab", grid.unit_vectors(), SIGMA)
    rotated = np.einsum("nab,mbn->man", sw, basis)
    return np.einsum("n,ian,jan->ij", grid.weights, np.conj(basis), rotated)


def su2_to_so3(a) -> np.ndarray:
    """Rotation R(A) defined by A* sigma_i A = sum_k R_ik sigma_k."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    if (np.max(np.abs(a.conj().T @ a - IDENTITY2)) > 1e-12
            or abs(np.linalg.det(a) - 1.0) > 1e-12):
        raise ValueError("matrix is not in SU(2)")
    conj = np.einsum("ba,ibc,cd->iad", a.conj(), SIGMA, a)
    r = 0.5 * np.einsum("iad,kda->ik", conj, SIGMA)
    return r.real
