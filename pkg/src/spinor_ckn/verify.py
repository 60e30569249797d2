"""Self-check suites run by ``spinor-ckn verify``.

Each suite returns a list of :class:`Check` records with the measured
error and the tolerance it was held to.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from . import closed_forms as cf
from . import regions as rg
from . import solver as sv
from .sphere_math import make_grid
from .spinor_harmonics import (
    AngularMode,
    apply_J_squared,
    apply_L_squared,
    apply_sigma_L_pointwise,
    chi_harmonic,
    chi_matrix,
    delta_coeff,
    delta_coeff_quadrature,
    harmonic_distance,
    modes_for_k,
    sigma_omega_matrix,
    truncated_modes,
)


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.measured <= self.tolerance)


def _harmonics() -> List[Check]:
    grid = make_grid(12, 24)
    modes = truncated_modes(4)
    basis = chi_matrix(modes, grid)
    gram = np.einsum("n,ian,jan->ij", grid.weights, np.conj(basis), basis)
    eig = ls = js = 0.0
    for md in modes:
        h = chi_harmonic(md)
        eig = max(eig, harmonic_distance(apply_sigma_L_pointwise(h), h, md.k))
        ls = max(ls, harmonic_distance(apply_L_squared(h), h, md.k * (md.k + 1)))
        js = max(js, harmonic_distance(apply_J_squared(h), h, (md.k + 0.5) * (md.k + 1.5)))
    mult = max(abs(len(modes_for_k(k)) - 2 * abs(k + 1)) for k in range(-6, 5) if k != -1)
    s = sigma_omega_matrix(modes, grid)
    kk = np.diag([md.k + 1.0 for md in modes])
    leak = max((abs(s[i, j]) for i, a in enumerate(modes) for j, b in enumerate(modes)
                if a.k != -2 - b.k), default=0.0)
    return [
        Check("orthonormality", float(np.max(np.abs(gram - np.eye(len(modes))))), 1e-10),
        Check("sigma.L eigenvalue", eig, 1e-10),
        Check("L^2 eigenvalue", ls, 1e-10),
        Check("J^2 eigenvalue", js, 1e-10),
        Check("multiplicity 2|k+1|", float(mult), 0.0),
        Check("anticommutation", float(np.max(np.abs(s @ kk + kk @ s))), 1e-10),
        Check("sigma.w maps H_k to H_{-2-k}", float(leak), 1e-10),
    ]


def _delta() -> List[Check]:
    grid = make_grid(12, 24)
    worst = max(abs(delta_coeff(md) - delta_coeff_quadrature(md, grid))
                for md in truncated_modes(4) if md.k != 0)
    return [Check("delta closed form vs quadrature", worst, 1e-10)]


def _constants() -> List[Check]:
    duality = max(abs(cf.c_lieb_thirring(cf.gamma_of_p(p)) * cf.K_gn(1.0, p) ** (p / (p - 2.0)) - 1.0)
                  for p in (2.5, 3.0, 4.0, 5.0, 5.9))
    lam_grid = [k - 0.5 for k in range(-3, 4) if k != 0]
    return [
        Check("Lieb-Thirring duality", duality, 1e-12),
        Check("Hardy constant at -1/2", abs(cf.hardy_constant(-0.5) - 1.0), 0.0),
        Check("Hardy constant on Lambda", max(cf.hardy_constant(a) for a in lam_grid), 0.0),
        Check("C* at (0,4)", abs(cf.C_star_log(0.0, 4.0) - 2.0 / math.sqrt(6.0)), 1e-14),
    ]


def _recursion() -> List[Check]:
    rng = np.random.default_rng(7)
    z1 = rec = 0.0
    for _ in range(20):
        alpha = rng.uniform(-0.45, 0.95)
        q = rng.uniform(2.1, min(cf.q_threshold(alpha), 40.0))
        z1 = max(z1, abs(cf.z_plus(1, alpha, q) - 1.0), abs(cf.z_minus(1, alpha, q) - 1.0))
        for sign, z in (("+", cf.z_plus), ("-", cf.z_minus)):
            for ell in range(1, 51):
                a, b = cf.recursion_coeffs(sign, ell, alpha, q)
                rec = max(rec, abs(z(ell + 1, alpha, q) - (a + b * z(ell, alpha, q))))
    return [Check("z_1 = 1", z1, 0.0), Check("recursion identity", rec, 1e-10)]


def _beckner() -> List[Check]:
    cases = [(0.0, 4.0), (0.5, 5.0), (-0.25, 20.0)]
    worst = max(abs(cf.beckner_B(a, q) - 2.0 * cf.m_alpha(a)) for a, q in cases)
    return [Check("B = 2 m(alpha)", worst, 1e-9)]


def _poschl_teller() -> List[Check]:
    grid = sv.GridSpec(30.0, 4096)
    worst = 0.0
    for nu in (1, 2, 3):
        e0, _ = sv.schrodinger_ground_1d(lambda s: nu * (nu + 1) / np.cosh(s) ** 2, grid)
        worst = max(worst, abs(e0 + nu * nu))
    return [Check("Poschl-Teller ground energies", worst, 1e-6)]


def _stability() -> List[Check]:
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(10):
        k = int(rng.choice([-3, -2, 1, 2]))
        md = modes_for_k(k)[int(rng.integers(len(modes_for_k(k))))]
        alpha = rng.uniform(-0.45, 1.4)
        if cf.in_lambda(alpha, 1e-3):
            alpha += 0.01
        p = rng.uniform(2.2, 5.8)
        worst = max(worst, abs(sv.channel_stability_min(k, md.m, alpha, p)
                               - rg.stability_index(k, md.m, alpha, p)))
    return [Check("channel minimum vs closed-form index", worst, 1e-4)]


def _regions() -> List[Check]:
    mismatch = 0
    for a in np.linspace(-3.0, 2.0, 61):
        for p in np.linspace(2.05, 5.95, 40):
            if rg.classify(a, p).verdict != rg.classify(-1.0 - a, p).verdict:
                mismatch += 1
    inv = max(abs(rg.p_curve(2, rg.alpha_curve(2, p)) - p) for p in (2.5, 3.0, 4.0, 5.0, 5.5))
    return [Check("reflection invariance of verdicts", float(mismatch), 0.0),
            Check("p_2 inverts alpha_2", inv, 1e-9)]


def _solver() -> List[Check]:
    res = sv.cylinder_minimize(0.0, 4.0)
    target = cf.C_star_log(0.0, 4.0)
    return [Check("cylinder value at (0,4)", abs(res.C_num - target) / target, 5e-3),
            Check("symmetry defect at (0,4)", res.symmetry_defect, 1e-6),
            Check("Euler-Lagrange residual at (0,4)", res.residual, 1e-6)]


SUITES: Dict[str, Callable[[], List[Check]]] = {
    "harmonics": _harmonics,
    "delta": _delta,
    "constants": _constants,
    "recursion": _recursion,
    "beckner": _beckner,
    "poschl-teller": _poschl_teller,
    "stability": _stability,
    "regions": _regions,
    "solver": _solver,
}


def run_suite(name: str) -> List[Check]:
    if name == "all":
        return [c for suite in SUITES.values() for c in suite()]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    return SUITES[name]()
