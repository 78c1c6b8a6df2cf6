import cmath
import math

import numpy as np
import pytest
from scipy.special import roots_jacobi

from cmsfermions.errors import NonConvergenceError, ToleranceNotMet
from cmsfermions.kernels import mu_lambda_batch
from cmsfermions.quadrature import (
    DEFAULT_EPS,
    OnShellResult,
    QuadratureSpec,
    damped_half_line,
    eps_limit,
    gauss_jacobi,
    integrate_in,
    integrate_out_pbc,
    integrate_out_sbc_regularized,
    integrate_periodic_box,
    regularized_limit,
    tanh_sinh,
)


@pytest.mark.parametrize("n,a,b", [(5, 0.0, 0.0), (24, 0.5, 0.5), (40, 2.0, 1.0), (17, -0.5, 0.3)])
def test_gauss_jacobi_against_scipy(n, a, b):
    t, w = gauss_jacobi(n, a, b)
    rt, rw = roots_jacobi(n, a, b)
    order = np.argsort(t)
    assert np.allclose(t[order], np.sort(rt), atol=1e-13)
    assert np.allclose(w[order], rw[np.argsort(rt)], rtol=1e-11)


def test_tanh_sinh_integrates_endpoint_singularity():
    t, w = tanh_sinh(80)
    val = np.sum(w * (1 - t) ** -0.5 * (1 + t) ** -0.5)
    assert val == pytest.approx(math.pi, rel=1e-8)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(nodes_per_dim=1)
    with pytest.raises(ValueError):
        QuadratureSpec(jacobi_alpha=-1.0)
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(scheme="simpson")
    q = QuadratureSpec(scheme="TanhSinh", nodes_per_dim=30)
    assert q.scheme == "tanh-sinh"
    assert QuadratureSpec.from_json(q.to_json()) == q


def test_box_volume():
    assert integrate_in(lambda X: np.ones(len(X)), (1.0, 0.5, 0.0)) == pytest.approx(0.25, rel=1e-14)


def test_beta_integral_n1():
    x = np.array([1.0, 0.0])
    q = QuadratureSpec().with_exponents(1.0)
    assert integrate_in(lambda X: mu_lambda_batch(x, X, 1.0), x, q) == pytest.approx(1 / 6, rel=1e-13)


def test_n2_half_integer_coupling_is_configuration_independent():
    lam = 0.5
    exact = math.gamma(1.5) ** 3 / math.gamma(4.5)
    q = QuadratureSpec().with_exponents(lam)
    for x in ([1.0, 0.2, -0.9], [5.0, 4.9, -3.0], [0.1, 0.0, -0.05]):
        x = np.array(x)
        val = integrate_in(lambda X: mu_lambda_batch(x, X, lam), x, q)
        assert val == pytest.approx(exact, rel=1e-10)


def test_gaussian_exactness():
    # degree 2n-1 residual against the matching Jacobi weight on each interval
    n, lam = 6, 0.7
    q = QuadratureSpec(nodes_per_dim=n, max_nodes=4 * n).with_exponents(lam)
    x = np.array([2.0, 0.5, -1.0])
    rng = np.random.default_rng(0)
    c1, c2 = rng.normal(size=2 * n), rng.normal(size=2 * n)

    def f(X):
        w = ((x[0] - X[:, 0]) * (X[:, 0] - x[1]) * (x[1] - X[:, 1]) * (X[:, 1] - x[2])) ** lam
        return w * np.polyval(c1, X[:, 0]) * np.polyval(c2, X[:, 1])

    from scipy.integrate import quad

    def one(lo, hi, c):
        return quad(lambda u: ((hi - u) * (u - lo)) ** lam * np.polyval(c, u), lo, hi,
                    epsabs=0, epsrel=1e-13, limit=200)[0]

    exact = one(x[1], x[0], c1) * one(x[2], x[1], c2)
    assert integrate_in(f, x, q) == pytest.approx(exact, rel=1e-12)


def test_doubling_changes_little():
    lam = 1.3
    x = np.array([1.0, 0.1, -0.4, -2.0])
    base = QuadratureSpec(nodes_per_dim=24, rel_tol=1e-10).with_exponents(lam)
    finer = QuadratureSpec(nodes_per_dim=48, rel_tol=1e-10).with_exponents(lam)
    f = lambda X: mu_lambda_batch(x, X, lam)  # noqa: E731
    assert abs(integrate_in(f, x, base) / integrate_in(f, x, finer) - 1) < 1e-10


def test_scale_covariance_n1():
    # the measure scales as s^{-1}, the interval as s: the integral is invariant
    lam = 0.8
    q = QuadratureSpec().with_exponents(lam)
    x = np.array([0.9, -0.3])
    ref = integrate_in(lambda X: mu_lambda_batch(x, X, lam), x, q)
    for s, t in [(3.0, 1.0), (0.01, -5.0)]:
        y = s * x + t
        assert integrate_in(lambda X: mu_lambda_batch(y, X, lam), y, q) == pytest.approx(ref, rel=1e-12)


def test_escalation_failure_reports_estimate():
    q = QuadratureSpec(nodes_per_dim=4, max_nodes=8, rel_tol=1e-14)
    with pytest.raises(ToleranceNotMet) as info:
        integrate_in(lambda X: np.cos(40 * X[:, 0]), (1.0, 0.0), q)
    assert info.value.estimate is not None


def test_non_finite_integrand_rejected():
    with pytest.raises(ValueError):
        integrate_in(lambda X: np.full(len(X), np.nan), (1.0, 0.0))


def test_periodic_fourier_orthogonality():
    L = 2.0
    k1 = 2 * math.pi * 3 / L
    for k, expected in [(k1, 1.0), (2 * math.pi * 5 / L, 0.0)]:
        val = integrate_out_pbc(lambda X: np.exp(1j * (k1 - k) * X[:, 0]) / L, [], L)
        assert abs(val - expected) <= 1e-10


def test_periodic_rectangle():
    assert integrate_out_pbc(lambda X: np.ones(len(X)), [0.3], 1.0) == pytest.approx(0.21, rel=1e-14)


def test_periodic_box_rule():
    L = 3.0
    val = integrate_periodic_box(lambda X: np.cos(2 * math.pi * X[:, 0] / L) ** 2, L, 2, n=16)
    assert val == pytest.approx(L * L / 2, rel=1e-13)


def test_half_line_plane_wave_limit():
    k1, k, x1 = 1.1, 0.4, 0.3

    def value(eps):
        return damped_half_line(lambda u: np.exp(1j * (k1 - k) * u), x1, 1, eps)

    limit = regularized_limit(value)
    exact = cmath.exp(1j * (k1 - k) * x1) / (1j * (k - k1))
    assert abs(limit - exact) <= 1e-6 * abs(exact)


def test_three_eps_values_are_less_accurate():
    k1, k, x1 = 1.1, 0.4, 0.3

    def value(eps):
        return damped_half_line(lambda u: np.exp(1j * (k1 - k) * u), x1, 1, eps)

    exact = cmath.exp(1j * (k1 - k) * x1) / (1j * (k - k1))
    three = regularized_limit(value, (0.1, 0.05, 0.025))
    five = regularized_limit(value, DEFAULT_EPS)
    assert abs(five - exact) < abs(three - exact)


def test_on_shell_growth_is_reported():
    def value(eps):
        return damped_half_line(lambda u: np.ones_like(u) + 0j, 0.0, 1, eps)

    res = regularized_limit(value)
    assert isinstance(res, OnShellResult)
    assert res.residue == pytest.approx(1.0, rel=1e-8)


def test_growing_integrand_detected():
    with pytest.raises(NonConvergenceError):
        damped_half_line(lambda u: np.exp(0.2 * u), 0.0, 1, 0.1)


def test_free_fermion_two_to_one_annihilation_vanishes():
    k1, k2, k = 1.3, -0.6, 0.35
    x1 = 0.4

    def term(ka, kb):
        # e^{ik x1} e^{-ik(x'1+x'2)} e^{i ka x'1 + i kb x'2}
        return [lambda u: np.exp(1j * (ka - k) * u), lambda u: np.exp(1j * (kb - k) * u)]

    def value(eps):
        plus = integrate_out_sbc_regularized([term(k1, k2)], [x1], eps)
        minus = integrate_out_sbc_regularized([term(k2, k1)], [x1], eps)
        return cmath.exp(1j * k * x1) * (plus - minus) / math.sqrt(2)

    assert abs(regularized_limit(value)) <= 1e-6


def test_eps_limit_needs_three_points():
    with pytest.raises(ValueError):
        eps_limit({0.1: 1.0, 0.05: 1.0})
