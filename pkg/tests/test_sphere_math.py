import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import sph_harm_y

from spinor_ckn.sphere_math import (
    Direction,
    HarmonicIndex,
    integrate,
    ladder_apply,
    ladder_coefficient_squared,
    log_gamma,
    make_grid,
    sph_harm,
    sph_harm_array,
)


@pytest.mark.parametrize("x, expected", [(1.0, 0.0), (0.5, 0.5 * math.log(math.pi)), (5.0, math.log(24.0))])
def test_log_gamma_values(x, expected):
    assert log_gamma(x) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("x", [0.1, 0.5, 1.5, 7.3])
def test_log_gamma_recurrence(x):
    assert abs(log_gamma(x + 1) - log_gamma(x) - math.log(x)) < 1e-12


@pytest.mark.parametrize("x", [0.0, -1.0])
def test_log_gamma_rejects_nonpositive(x):
    with pytest.raises(ValueError):
        log_gamma(x)


def test_harmonic_index_validation():
    with pytest.raises(ValueError):
        HarmonicIndex(1, 2)
    with pytest.raises(ValueError):
        HarmonicIndex(-1, 0)
    with pytest.raises(ValueError):
        HarmonicIndex(65, 0)


def test_sph_harm_examples():
    d = Direction(0.7, 2.1)
    assert sph_harm(HarmonicIndex(0, 0), d) == pytest.approx(1.0)
    assert sph_harm(HarmonicIndex(1, 0), Direction(0.0, 0.0)) == pytest.approx(math.sqrt(3.0))


def test_matches_scipy_times_sqrt_4pi():
    rng = np.random.default_rng(0)
    theta = rng.uniform(0, np.pi, 50)
    phi = rng.uniform(0, 2 * np.pi, 50)
    for ell in range(0, 12):
        for m in range(-ell, ell + 1):
            ref = math.sqrt(4 * math.pi) * sph_harm_y(ell, m, theta, phi)
            assert np.max(np.abs(sph_harm_array(ell, m, theta, phi) - ref)) < 1e-11


def test_conjugation_symmetry():
    rng = np.random.default_rng(1)
    theta = rng.uniform(0, np.pi, 1000)
    phi = rng.uniform(0, 2 * np.pi, 1000)
    for ell in range(0, 6):
        for m in range(-ell, ell + 1):
            lhs = np.conj(sph_harm_array(ell, m, theta, phi))
            rhs = (-1) ** m * sph_harm_array(ell, -m, theta, phi)
            assert np.max(np.abs(lhs - rhs)) < 1e-13


def test_orthonormality_up_to_8():
    grid = make_grid(16, 32)
    idx = [(l, m) for l in range(9) for m in range(-l, l + 1)]
    ys = np.array([sph_harm_array(l, m, grid.theta, grid.phi) for l, m in idx])
    gram = np.einsum("n,in,jn->ij", grid.weights, ys, np.conj(ys))
    assert np.max(np.abs(gram - np.eye(len(idx)))) < 1e-10


def test_high_degree_stays_finite_and_normalized():
    grid = make_grid(70, 140)
    y = sph_harm_array(64, 40, grid.theta, grid.phi)
    assert np.all(np.isfinite(y))
    assert integrate(grid, np.abs(y) ** 2).real == pytest.approx(1.0, abs=1e-10)


def test_ladder_examples():
    assert ladder_apply("L3", HarmonicIndex(3, 2)) == (2.0, HarmonicIndex(3, 2))
    assert ladder_apply("Lplus", HarmonicIndex(1, 1)) == (0.0, None)
    c, idx = ladder_apply("Lplus", HarmonicIndex(1, 0))
    assert c == pytest.approx(math.sqrt(2)) and idx == HarmonicIndex(1, 1)
    with pytest.raises(ValueError):
        ladder_apply("Lx", HarmonicIndex(1, 0))


@given(st.integers(0, 40).flatmap(lambda l: st.tuples(st.just(l), st.integers(-l, l))))
def test_casimir_from_ladder_is_exact(lm):
    # L- L+ + L3^2 + L3 = l(l+1), using exact integer squared coefficients
    ell, m = lm
    up = ladder_coefficient_squared("Lplus", ell, m)
    assert up + m * m + m == ell * (ell + 1)
    if m + 1 <= ell:
        assert ladder_coefficient_squared("Lminus", ell, m + 1) == up


def test_ladder_matches_differential_operator():
    # L+ = e^{i phi}(d/dtheta + i cot(theta) d/dphi); check numerically for l=3, m=1
    theta, phi, eps = 0.9, 0.4, 1e-6
    f = lambda t, p: sph_harm_array(3, 1, t, p)
    d_theta = (f(theta + eps, phi) - f(theta - eps, phi)) / (2 * eps)
    d_phi = (f(theta, phi + eps) - f(theta, phi - eps)) / (2 * eps)
    lplus = np.exp(1j * phi) * (d_theta + 1j / math.tan(theta) * d_phi)
    c, idx = ladder_apply("Lplus", HarmonicIndex(3, 1))
    assert abs(lplus - c * sph_harm_array(3, 2, theta, phi)) < 1e-7


def test_make_grid_examples():
    g = make_grid(1, 1)
    assert g.size == 1 and g.weights[0] == pytest.approx(1.0)
    g = make_grid(8, 16)
    assert g.size == 128
    assert abs(g.weights.sum() - 1.0) < 1e-15
    y = sph_harm_array(3, 2, g.theta, g.phi)
    assert integrate(g, np.abs(y) ** 2).real == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        make_grid(0, 4)


def test_integrate_examples():
    g = make_grid(8, 16)
    assert integrate(g, lambda t, p: 2.5 + 0 * t) == pytest.approx(2.5)
    assert abs(integrate(g, lambda t, p: sph_harm_array(1, 0, t, p))) < 1e-14
    val = integrate(g, lambda t, p: np.abs(sph_harm_array(2, 1, t, p)) ** 2)
    assert val == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30)
@given(st.floats(0, math.pi), st.floats(0, 2 * math.pi))
def test_direction_unit_vector(theta, phi):
    assert np.linalg.norm(Direction(theta, phi).unit_vector()) == pytest.approx(1.0)
