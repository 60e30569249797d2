import math

import numpy as np
import pytest

from spinor_ckn import closed_forms as cf
from spinor_ckn import regions as rg
from spinor_ckn import solver as sv
from spinor_ckn.closed_forms import in_lambda
from spinor_ckn.sphere_math import make_grid
from spinor_ckn.spinor_harmonics import AngularMode, modes_for_k, truncated_modes


def dense_operator(grid):
    """Dense -d^2/ds^2 on the interior nodes, built from the stencil."""
    n = grid.n_interior
    coef = sv._stencil(grid)
    mat = coef[0] * np.eye(n)
    for off, c in enumerate(coef[1:], start=1):
        mat += c * (np.eye(n, k=off) + np.eye(n, k=-off))
    if grid.order == 4:
        # ghost values beyond the ends are odd reflections
        mat[0, 0] -= coef[2]
        mat[-1, -1] -= coef[2]
    return mat


# -- grid --

def test_gridspec_validation():
    with pytest.raises(ValueError):
        sv.GridSpec(0.0, 100)
    with pytest.raises(ValueError):
        sv.GridSpec(10.0, 15)
    with pytest.raises(ValueError):
        sv.GridSpec(10.0, 100, order=3)
    g = sv.GridSpec(10.0, 101)
    assert g.h == pytest.approx(0.2)
    assert g.s[0] == -10.0 and g.s[-1] == 10.0


@pytest.mark.parametrize("alpha, p", [(0.0, 4.0), (-0.45, 4.0), (0.9, 5.0), (-1.3, 2.5)])
def test_auto_grid_decay(alpha, p):
    g = sv.GridSpec.auto(alpha, p)
    assert g.decay_ratio(alpha, p) <= sv.BOUNDARY_TOL * (1 + 1e-9)


def test_auto_grid_rejects_zero_mass():
    with pytest.raises(ValueError):
        sv.GridSpec.auto(0.5, 4.0)


@pytest.mark.parametrize("order", [2, 4])
def test_neg_laplacian_matches_dense(order):
    g = sv.GridSpec(5.0, 40, order)
    u = np.random.default_rng(0).standard_normal(g.n_interior)
    assert np.allclose(sv.neg_laplacian(u.copy(), g), dense_operator(g) @ u)


def test_neg_laplacian_accuracy_on_gaussian():
    g = sv.GridSpec(10.0, 801)
    s = g.interior
    exact = (1 - s * s) * np.exp(-s * s / 2)
    assert np.max(np.abs(sv.neg_laplacian(np.exp(-s * s / 2), g) - exact)) < 1e-5


# -- Schroedinger ground states --

@pytest.mark.parametrize("order", [2, 4])
def test_free_dirichlet_ground_state(order):
    g = sv.GridSpec(5.0, 2001, order)
    e0, psi = sv.schrodinger_ground_1d(np.zeros(g.n_points), g)
    if order == 2:
        # exact eigenvalue of the three-point matrix
        assert e0 == pytest.approx(4 / g.h ** 2 * math.sin(math.pi * g.h / 20) ** 2, abs=1e-10)
    else:
        assert e0 == pytest.approx((math.pi / 10.0) ** 2, rel=1e-8)
    assert np.all(psi >= 0) and psi[0] == psi[-1] == 0.0
    assert g.h * np.sum(psi ** 2) == pytest.approx(1.0)


@pytest.mark.parametrize("nu", [1, 2, 3])
def test_poschl_teller_ground_energies(nu):
    g = sv.GridSpec(30.0, 4096)
    e0, _ = sv.schrodinger_ground_1d(lambda s: nu * (nu + 1) / np.cosh(s) ** 2, g)
    assert abs(e0 + nu * nu) < 1e-6


def test_three_point_stencil_is_second_order():
    e = []
    for n in (1024, 2048):
        g = sv.GridSpec(30.0, n, order=2)
        e.append(abs(sv.schrodinger_ground_1d(lambda s: 2 / np.cosh(s) ** 2, g)[0] + 1))
    assert 3.5 < e[0] / e[1] < 4.5


def test_general_poschl_teller_well():
    a, b = 1.805 * 5 / 3, 0.95
    g = sv.GridSpec(30.0, 4096)
    e0, _ = sv.schrodinger_ground_1d(lambda s: a / np.cosh(b * s) ** 2, g)
    assert abs(e0 + 1.75118) < 1e-5
    assert abs(e0 + sv.poschl_teller_lambda1(a, b)) < 1e-7


@pytest.mark.parametrize("order", [2, 4])
def test_schrodinger_against_dense_eigh(order):
    g = sv.GridSpec(8.0, 300, order)
    v = 3 * np.exp(-g.s ** 2) + np.sin(g.s)
    mat = dense_operator(g) - np.diag(v[1:-1])
    w, vecs = np.linalg.eigh(mat)
    e0, psi = sv.schrodinger_ground_1d(v, g)
    assert e0 == pytest.approx(w[0], abs=1e-10)
    ref = np.abs(vecs[:, 0]) / math.sqrt(g.h)
    assert np.allclose(psi[1:-1], ref, atol=1e-8)


def test_schrodinger_rejects_bad_potential():
    g = sv.GridSpec(5.0, 50)
    with pytest.raises(ValueError):
        sv.schrodinger_ground_1d(np.zeros(10), g)
    with pytest.raises(ValueError):
        sv.schrodinger_ground_1d(np.full(50, np.inf), g)


def test_poschl_teller_lambda1_examples():
    assert sv.poschl_teller_lambda1(2, 1) == pytest.approx(1.0)
    assert sv.poschl_teller_lambda1(6, 1) == pytest.approx(4.0)
    assert sv.poschl_teller_lambda1(1e-6, 1) < 1e-11
    with pytest.raises(ValueError):
        sv.poschl_teller_lambda1(0, 1)


# -- channel minimum --

def test_channel_stability_examples():
    assert abs(sv.channel_stability_min(-2, 0.5, -0.45, 4) + 0.6487) < 1e-4
    assert sv.channel_stability_min(1, 0.5, 0.5 + 1e-8, 4) == pytest.approx(1.0, abs=1e-5)
    assert sv.channel_stability_min(1, 0.5, 0.9, 5) < 0


def test_channel_oracle_equivalence():
    rng = np.random.default_rng(21)
    for _ in range(50):
        k = int(rng.choice([-4, -3, -2, 1, 2, 3]))
        modes = modes_for_k(k)
        md = modes[int(rng.integers(len(modes)))]
        alpha = rng.uniform(-0.49, 1.4)
        if in_lambda(alpha, 1e-3):
            continue
        p = rng.uniform(2.05, 5.95)
        assert abs(sv.channel_stability_min(k, md.m, alpha, p) - rg.stability_index(k, md.m, alpha, p)) < 1e-4


def test_channel_stability_domain():
    with pytest.raises(ValueError):
        sv.channel_stability_min(1, 0.5, -0.7, 4)
    with pytest.raises(ValueError):
        sv.channel_stability_min(1, 0.5, 0.2, 6.5)


# -- 1D problems --

def test_gn_minimize_examples():
    g = sv.GridSpec(30.0, 2048)
    val = sv.gn_minimize_1d(0.0, 4.0, g)
    assert abs(val - 2 / math.sqrt(6)) < 1e-4
    assert abs(sv.gn_minimize_1d(-1.0, 4.0, g) - val) < 1e-8


@pytest.mark.parametrize("alpha, p", [(0.0, 4.0), (0.2, 3.0), (-0.3, 5.0)])
def test_rayleigh_quotient_at_optimizer(alpha, p):
    g = sv.GridSpec.auto(alpha, p, 4096)
    u = cf.u_star(g.s, alpha, p)
    assert abs(sv.rayleigh_quotient_1d(u, cf.symmetric_mass(alpha), p, g) - cf.C_star_log(alpha, p)) < 1e-6


def test_gn_minimize_domain():
    g = sv.GridSpec(10.0, 100)
    with pytest.raises(ValueError):
        sv.gn_minimize_1d(0.5, 4.0, g)
    with pytest.raises(ValueError):
        sv.gn_minimize_1d(0.0, 6.0, g)


def test_restricted_class_examples():
    g = sv.GridSpec(30.0, 1024)
    res = sv.restricted_S_minimize(0.0, 4.0, g)
    assert abs(res.value - cf.C_star_log(0, 4)) < 1e-3
    assert res.norm_ratio < 1e-4
    swapped = sv.restricted_S_minimize(-1.0, 4.0, g)
    assert swapped.value == pytest.approx(res.value, rel=1e-8)
    assert np.linalg.norm(swapped.u) < 1e-4 * np.linalg.norm(swapped.v)


def test_restricted_class_at_degenerate_channel_pair():
    # equal masses: any mixture v = c u with c >= 0 is optimal
    g = sv.GridSpec(30.0, 1024)
    res = sv.restricted_S_minimize(-0.5, 4.0, g, mix=0.5)
    assert abs(res.value - cf.C_star_log(-0.5, 4.0)) < 1e-3
    assert np.allclose(res.v, 0.5 * res.u, atol=1e-6 * np.max(np.abs(res.u)))


# -- cylinder functional --

def symmetric_field(alpha, p, grid, k_max=2, k=0):
    fld = sv.CylinderField.zeros(grid, k_max)
    fld.coeffs[fld.index(AngularMode(k, 1))] = cf.u_star(grid.s, alpha, p)
    return fld


def random_field(rng, grid, k_max=2):
    fld = sv.CylinderField.zeros(grid, k_max)
    env = np.exp(-grid.s ** 2 / 8)
    fld.coeffs[:] = (rng.standard_normal(fld.coeffs.shape) + 1j * rng.standard_normal(fld.coeffs.shape)) * env
    fld.coeffs[:, [0, -1]] = 0
    return fld


def test_functional_G_at_symmetric_optimizer():
    g = sv.GridSpec(30.0, 1024)
    fld = symmetric_field(0.0, 4.0, g)
    assert abs(sv.functional_G(fld, 0.0, 4.0) - cf.C_star_log(0.0, 4.0)) < 2e-4


def test_functional_G_homogeneous():
    g = sv.GridSpec(12.0, 128)
    fld = random_field(np.random.default_rng(1), g)
    base = sv.functional_G(fld, 0.1, 3.5)
    scaled = sv.CylinderField(g, fld.modes, (2.5 - 1.5j) * fld.coeffs)
    assert abs(sv.functional_G(scaled, 0.1, 3.5) / base - 1) < 1e-12


def test_functional_G_prefers_k0_channel():
    g = sv.GridSpec(30.0, 1024)
    sym = sv.functional_G(symmetric_field(0.0, 4.0, g), 0.0, 4.0)
    other = sv.functional_G(symmetric_field(0.0, 4.0, g, k=-2), 0.0, 4.0)
    assert other > sym


def test_functional_G_rejects_zero_field():
    with pytest.raises(ValueError):
        sv.functional_G(sv.CylinderField.zeros(sv.GridSpec(5.0, 32), 1), 0.0, 4.0)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(8)
    g = sv.GridSpec(10.0, 64)
    sphere = make_grid(8, 16)
    alpha, p = 0.2, 3.7
    for _ in range(20):
        fld = random_field(rng, g)
        d = random_field(rng, g)
        grad = sv.functional_G_gradient(fld, alpha, p, sphere)
        analytic = g.h * float(np.real(np.vdot(grad, d.coeffs)))
        eps = 1e-6
        plus = sv.CylinderField(g, fld.modes, fld.coeffs + eps * d.coeffs)
        minus = sv.CylinderField(g, fld.modes, fld.coeffs - eps * d.coeffs)
        numeric = (sv.functional_G(plus, alpha, p, sphere) - sv.functional_G(minus, alpha, p, sphere)) / (2 * eps)
        assert abs(analytic - numeric) <= 1e-6 * abs(numeric)


@pytest.mark.parametrize("t", [1.5, 2.0])
def test_scaling_law_for_symmetric_fields(t):
    # dilation s -> t s with alpha_t - 1/2 = t (alpha - 1/2)
    alpha, p = 0.1, 3.5
    alpha_t = 0.5 + t * (alpha - 0.5)
    g = sv.GridSpec(20.0, 800)
    g_t = sv.GridSpec(20.0 / t, 800)
    rng = np.random.default_rng(2)
    fld = sv.CylinderField.zeros(g, 2)
    for md in (AngularMode(0, 1), AngularMode(0, -1)):
        fld.coeffs[fld.index(md)] = rng.standard_normal() * np.exp(-g.s ** 2 / 4) * (1 + 0.3 * np.sin(g.s))
    fld_t = sv.CylinderField(g_t, fld.modes, fld.coeffs)
    lhs = sv.functional_G(fld_t, alpha_t, p)
    rhs = t ** (1 + 2 / p) * sv.functional_G(fld, alpha, p)
    assert abs(lhs / rhs - 1) < 1e-6
    assert cf.C_star_log(alpha_t, p) == pytest.approx(t ** (1 + 2 / p) * cf.C_star_log(alpha, p), rel=1e-12)


@pytest.mark.parametrize("alpha", np.round(np.arange(-3.0, 2.01, 0.1), 10))
def test_hardy_limit_of_mode_masses(alpha):
    masses = sv._masses(truncated_modes(6), alpha)
    assert float(np.min(masses)) == pytest.approx(cf.hardy_constant(alpha), abs=1e-15)


def test_coercivity_mode_diagonal():
    rng = np.random.default_rng(6)
    g = sv.GridSpec(10.0, 128)
    for alpha in (-0.45, 0.0, 0.3, 0.9, 1.7, -2.2):
        eps = cf.coercivity_eps(alpha)
        fld = random_field(rng, g, k_max=4)
        quad = float(np.sum(sv.mode_energies(fld, alpha)))
        u = fld.interior()
        grad2 = g.h * float(np.real(np.vdot(u, sv.neg_laplacian(u.copy(), g))))
        ang = np.array([md.k * (md.k + 1) + 1.0 for md in fld.modes])
        rest = float(np.sum(ang * fld.mode_norms2()))
        assert quad >= eps * (grad2 + rest) - 1e-10


def test_cylinder_field_parseval():
    rng = np.random.default_rng(9)
    g = sv.GridSpec(8.0, 64)
    fld = random_field(rng, g, k_max=3)
    sphere = sv.default_sphere_grid(3)
    vals = fld.samples(sphere)
    quad = g.h * float(np.sum(np.sum(np.abs(vals) ** 2, axis=1) @ sphere.weights))
    assert abs(quad - fld.norm2()) < 1e-10 * fld.norm2()


def test_cylinder_field_shape_check():
    g = sv.GridSpec(5.0, 32)
    with pytest.raises(ValueError):
        sv.CylinderField(g, truncated_modes(1), np.zeros((3, 32)))


def test_symmetric_mode_masks():
    modes = truncated_modes(3)
    ks = lambda mask: {md.k for md, on in zip(modes, mask) if on}
    assert ks(sv.symmetric_modes(modes, 0.2)) == {0}
    assert ks(sv.symmetric_modes(modes, -0.8)) == {-2}
    assert ks(sv.symmetric_modes(modes, -0.5)) == {0, -2}


# -- full minimization --

@pytest.fixture(scope="module")
def symmetric_solve():
    return sv.cylinder_minimize(0.0, 4.0)


def test_cylinder_symmetric_point(symmetric_solve):
    res = symmetric_solve
    target = cf.C_star_log(0.0, 4.0)
    assert abs(res.C_num - target) / target < 5e-3
    assert res.symmetry_defect < 1e-6
    assert res.converged and res.residual < 1e-6
    assert res.C_num <= target + 1e-6
    assert [s.label for s in res.starts] == ["symmetric", "perturbed", "random"]


def test_cylinder_euler_lagrange_residual(symmetric_solve):
    # -u'' + (k - alpha + 1/2)^2 u = P(|phi|^{p-2} phi), checked independently
    res, p = symmetric_solve, 4.0
    fld = res.field
    g = fld.grid
    sphere = sv.default_sphere_grid(3)
    from spinor_ckn.spinor_harmonics import chi_matrix
    basis = chi_matrix(fld.modes, sphere)
    vals = fld.samples(sphere)[1:-1]
    mod = np.sqrt(np.sum(np.abs(vals) ** 2, axis=1))
    nl = np.einsum("icj,acj,j->ai", mod[:, None, :] ** (p - 2) * vals, np.conj(basis), sphere.weights)
    u = fld.interior()
    lhs = sv.neg_laplacian(u.copy(), g) + sv._masses(fld.modes, 0.0)[:, None] * u
    n_p = g.h * np.sum(mod ** p @ sphere.weights)
    assert n_p ** ((p - 2) / p) == pytest.approx(res.C_num, rel=1e-10)
    err = np.linalg.norm(lhs - nl) / np.linalg.norm(lhs)
    assert err < 1e-5


def test_cylinder_rejects_degenerate_points():
    with pytest.raises(ValueError):
        sv.cylinder_minimize(0.5, 4.0)
    with pytest.raises(ValueError):
        sv.cylinder_minimize(0.0, 6.0)


def test_cylinder_result_invariants(symmetric_solve):
    res = symmetric_solve
    assert 0.0 <= res.symmetry_defect <= 1.0
    assert sum(res.per_mode_energy.values()) == pytest.approx(res.C_num, rel=1e-8)
