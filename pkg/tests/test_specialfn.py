import cmath
import math

import mpmath
import numpy as np
import pytest

from cmsfermions.errors import PoleError
from cmsfermions.specialfn import beta, gamma, hyp2f1, hyp2f1_series, log_gamma

mpmath.mp.dps = 30


def test_log_gamma_small_values():
    assert log_gamma(1) == pytest.approx(0, abs=1e-15)
    assert log_gamma(5).real == pytest.approx(math.log(24), rel=1e-14)
    assert abs(log_gamma(5).imag) < 1e-15


def test_reflection_at_complex_point():
    x = 0.3 + 0.2j
    val = gamma(x) * gamma(1 - x) * cmath.sin(math.pi * x) / math.pi
    assert abs(val - 1) < 1e-12


@pytest.mark.parametrize("z", [0, -1, -3, -10])
def test_poles_raise(z):
    with pytest.raises(PoleError):
        log_gamma(z)


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        log_gamma(float("nan"))


def test_log_gamma_matches_mpmath_on_disc():
    rng = np.random.default_rng(7)
    for _ in range(300):
        r, t = 50 * math.sqrt(rng.uniform()), rng.uniform(0, 2 * math.pi)
        z = complex(r * math.cos(t), r * math.sin(t))
        if abs(z.imag) < 1e-3 and z.real < 0.5 and abs(z.real - round(z.real)) < 1e-3:
            continue
        ours = log_gamma(z)
        ref = complex(mpmath.loggamma(mpmath.mpc(z.real, z.imag)))
        # relative error of Γ is the absolute error of its logarithm
        assert abs(ours - ref) <= 1e-12 * max(1.0, abs(ref) / 50), z


def test_reflection_grid():
    rng = np.random.default_rng(3)
    n = 0
    while n < 100:
        x = complex(*rng.uniform(-10, 10, 2))
        if abs(x.imag) < 0.05:
            continue
        n += 1
        val = gamma(x) * gamma(1 - x) * cmath.sin(math.pi * x) / math.pi
        assert abs(val - 1) <= 1e-10


def test_recurrence():
    rng = np.random.default_rng(11)
    for _ in range(100):
        z = complex(*rng.uniform(-8, 8, 2))
        if abs(z.imag) < 1e-2:
            continue
        assert abs(gamma(z + 1) / (z * gamma(z)) - 1) <= 1e-12


def test_beta_values():
    assert beta(2, 2).real == pytest.approx(1 / 6, rel=1e-14)
    assert beta(0.5, 0.5).real == pytest.approx(math.pi, rel=1e-14)
    # Dixon-Anderson at N=1, lambda=1
    lam = 1.0
    assert beta(lam + 1, lam + 1).real == pytest.approx(math.gamma(2) ** 2 / math.gamma(4), rel=1e-14)


def test_beta_complex_against_mpmath():
    for x, y in [(0.5j, 2), (1 + 2j, 0.3 - 1j), (3.2, 1.5 + 0.5j)]:
        ref = complex(mpmath.beta(x, y))
        assert abs(beta(x, y) - ref) <= 1e-12 * abs(ref)


def test_hyp2f1_trivial_cases():
    assert hyp2f1(1.3 + 0.2j, -0.7, 2.5, 0.0) == 1
    for z in (-3.0, -0.4, 0.3, 0.9):
        b, c = 0.7 + 0.3j, 1.9 - 0.5j
        assert abs(hyp2f1(-1, b, c, z) - (1 - b * z / c)) < 1e-14


def test_hyp2f1_c_pole():
    with pytest.raises(PoleError):
        hyp2f1(0.5, 0.5, -2, 0.3)


def test_hyp2f1_rejects_z_above_one():
    with pytest.raises(ValueError):
        hyp2f1(0.5, 0.5, 1.5, 1.5)


@pytest.mark.parametrize(
    "a,b,c",
    [
        (0.5, 1.5, 2.5),
        (1 - 0.8j, 2.0, 4.0),
        (2.5 - 1.3j, 1.5, 3.0),
        (-1.5, 0.7j, 1 + 0.7j),
        (-2.0, 0.4j, 1 + 0.4j),
        (0.3 + 0.4j, -0.2 + 1j, 1.7 - 0.3j),
    ],
)
def test_hyp2f1_against_mpmath(a, b, c):
    for z in np.concatenate([np.linspace(-6, 0.95, 29), [0.99, 0.999]]):
        ref = complex(mpmath.hyp2f1(a, b, c, float(z)))
        ours = hyp2f1(a, b, c, float(z))
        assert abs(ours - ref) <= 1e-10 * max(1.0, abs(ref)), (z, ours, ref)


def test_gauss_value_at_one():
    for a, b, c in [(0.5, 0.25, 2.0), (1 - 0.8j, 0.5, 3.0 + 0.2j), (-0.5j, 1.0, 2.5)]:
        exact = gamma(c) * gamma(c - a - b) / (gamma(c - a) * gamma(c - b))
        assert abs(hyp2f1(a, b, c, 1.0) - exact) <= 1e-8 * abs(exact)


def test_series_agrees_with_transformed_evaluation():
    for z in np.linspace(-0.5, 0.5, 21):
        a, b, c = 0.4 + 0.9j, 1.3, 2.1 - 0.4j
        assert abs(hyp2f1(a, b, c, z) - hyp2f1_series(a, b, c, z)) <= 1e-12 * abs(hyp2f1_series(a, b, c, z))


@pytest.mark.parametrize("lam", [1.0, 0.5, 2.0])
def test_morse_integral_prefactor(lam):
    # ∫_0^1 t^{ik-1}(1+t)^λ dt, with the t^{ik-1} part integrated in closed form
    k = 0.7
    rest = mpmath.quad(lambda t: t ** (1j * k - 1) * ((1 + t) ** lam - 1), [0, 1])
    integral = complex(rest) + 1 / (1j * k)
    inverse_k = hyp2f1(-lam, 1j * k, 1j * k + 1, -1.0) / (1j * k)
    with_beta = beta(1j * k, 1j * k + 1) * hyp2f1(-lam, 1j * k, 1j * k + 1, -1.0)
    assert abs(inverse_k - integral) <= 1e-10 * abs(integral)
    assert abs(with_beta - integral) > 1e-2 * abs(integral)
