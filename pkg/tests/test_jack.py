import cmath
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from cmsfermions.jack import (
    Partition,
    SymmetricPoly,
    alpha_from_lambda,
    bethe_quasimomenta,
    bethe_residual,
    dominates,
    ground_state_energy,
    jack_P,
    lambda_from_alpha,
    partitions_of,
    trig_eigenfunction,
    trig_energy,
    trig_quasimomenta,
    verify_annihilation_integral,
    verify_okounkov_recursion,
)
from cmsfermions.potentials import Kind, PotentialSpec
from cmsfermions.wavefunctions import WaveState, eigen_residual, slater


def schur_expanded(mu, nvars):
    """Schur polynomial via the Jacobi-Trudi determinant of complete symmetric polynomials."""
    xs = sympy.symbols(f"x0:{nvars}")

    def h(k):
        if k < 0:
            return sympy.Integer(0)
        if k == 0:
            return sympy.Integer(1)
        return sum(sympy.prod(c) for c in itertools.combinations_with_replacement(xs, k))

    l = len(mu)
    mat = sympy.Matrix(l, l, lambda i, j: h(mu[i] - i + j))
    poly = sympy.Poly(sympy.expand(mat.det()), *xs)
    return {tuple(m): Fraction(int(c)) for m, c in zip(poly.monoms(), poly.coeffs())}


def test_partition_conventions():
    p = Partition.from_increasing((0, 1, 3))
    assert p.parts == (3, 1, 0)
    assert p.to_increasing() == (0, 1, 3)
    assert Partition.parse("1,3,0") == p
    assert p.trimmed() == (3, 1)
    assert p.padded(4) == (3, 1, 0, 0)
    assert p.size == 4
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((2, -1))


def test_partitions_and_dominance():
    assert list(partitions_of(4)) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert list(partitions_of(4, max_parts=2)) == [(4,), (3, 1), (2, 2)]
    assert dominates((3, 1), (2, 2))
    assert not dominates((2, 2), (3, 1))
    assert not dominates((3, 3), (4, 1, 1)) and not dominates((4, 1, 1), (3, 3))


def test_alpha_lambda_map():
    assert alpha_from_lambda(1) == Fraction(1, 2)
    assert alpha_from_lambda(0) == 1
    assert lambda_from_alpha(Fraction(1, 3)) == 2


def test_single_box_and_two_box():
    for alpha in (Fraction(1, 3), Fraction(2), Fraction(7, 5)):
        assert jack_P((1,), 3, alpha).as_dict() == {(1,): 1}
        p2 = jack_P((2,), 2, alpha)
        assert p2.as_dict() == {(2,): 1, (1, 1): 2 / (1 + alpha)}


def test_schur_example():
    assert jack_P((2, 1), 3, 1).as_dict() == {(2, 1): 1, (1, 1, 1): 2}


def test_known_three_box_formulas():
    for alpha in (Fraction(1, 2), Fraction(3), Fraction(2, 7)):
        p3 = jack_P((3,), 3, alpha)
        assert p3.coefficient((2, 1)) == 3 / (1 + 2 * alpha)
        assert p3.coefficient((1, 1, 1)) == 6 / ((1 + alpha) * (1 + 2 * alpha))
        p21 = jack_P((2, 1), 3, alpha)
        assert p21.coefficient((1, 1, 1)) == 6 / (alpha + 2)


def test_schur_equality_small():
    for n in range(1, 5):
        for mu in partitions_of(n, 3):
            assert jack_P(mu, 3, 1).expand() == schur_expanded(mu, 3)


def test_stability_under_dropping_a_variable():
    alpha = Fraction(2, 3)
    for mu in [(2, 1), (3, 1), (2, 2), (2, 1, 1)]:
        big = jack_P(mu, 4, alpha).as_dict()
        small = jack_P(mu, 3, alpha).as_dict() if len(mu) <= 3 else {}
        restricted = {nu: c for nu, c in big.items() if len(nu) <= 3}
        assert restricted == small


def test_dominance_triangular():
    alpha = Fraction(5, 2)
    for mu in partitions_of(5, 4):
        poly = jack_P(mu, 4, alpha)
        assert poly.coefficient(mu) == 1
        assert all(dominates(mu, nu) for nu in poly.as_dict())


def test_size_limits():
    with pytest.raises(ValueError):
        jack_P((5, 4), 2, 1)
    with pytest.raises(ValueError):
        jack_P((1,), 5, 1)
    with pytest.raises(ValueError):
        jack_P((1,), 2, 0)
    assert jack_P((1, 1, 1), 2, 1).as_dict() == {}


def test_symmetric_poly_evaluation_and_json():
    p = jack_P((2, 1), 3, Fraction(1, 2))
    z = np.array([0.3 + 0.1j, -0.7, 1.2j])
    direct = sum(float(c) * np.prod(z ** np.array(e)) for e, c in p.expand().items())
    assert p(z) == pytest.approx(direct)
    assert np.allclose(p(np.stack([z, z[::-1]])), [p(z), p(z)])
    assert p.to_json_dict() == {"2,1": "1/1", "1,1,1": "12/5"}
    assert SymmetricPoly({(1,): 1}, 2) == jack_P((1,), 2, 3)


def test_free_ground_state_is_slater():
    L = 2 * math.pi
    ks = trig_quasimomenta((0, 0, 0), 0.0, L)
    assert np.allclose(ks, [1, 0, -1])
    ratios = []
    for x in ([4.0, 2.2, 0.7], [5.9, 3.0, 0.1], [1.5, 1.0, 0.2]):
        ratios.append(trig_eigenfunction((0, 0, 0), 0.0, L, x, "fermionic") / slater(ks, x))
    assert np.allclose(ratios, ratios[0], rtol=1e-10)


def test_ground_state_energy():
    assert ground_state_energy(3, 0.0) == pytest.approx(2.0)
    assert ground_state_energy(3, 0.0) == pytest.approx(float(np.sum(np.array([-1, 0, 1]) ** 2)))
    for lam in (0.0, 0.5, 2.0):
        for N in (2, 3, 4):
            assert ground_state_energy(N, lam) == pytest.approx(trig_energy((0,) * N, lam, 2 * math.pi))
    # a boost of K units adds N K² at zero total momentum
    assert ground_state_energy(3, 1.0, K=0.5) - ground_state_energy(3, 1.0) == pytest.approx(0.75)


@pytest.mark.parametrize("lam,phase", [(0.0, -1), (1.0, 1), (0.5, cmath.exp(1.5j * math.pi))])
def test_exchange_phase(lam, phase):
    L = 2 * math.pi
    a = trig_eigenfunction((2, 1), lam, L, [2.0, 0.5])
    b = trig_eigenfunction((2, 1), lam, L, [0.5, 2.0])
    assert b / a == pytest.approx(phase)


@pytest.mark.parametrize("lam", [0.0, 1.0])
@pytest.mark.parametrize("n", [(2, 1), (2, 1, 0)])
def test_trig_eigen_residual_order(lam, n):
    L = 2 * math.pi
    spec = PotentialSpec(Kind.TRIG, lam=lam, L=L)
    state = WaveState(spec, tuple(trig_quasimomenta(n, lam, L)))
    x = np.array([4.0, 2.2, 0.7][: len(n)])
    r1 = eigen_residual(state, x, 1e-3)
    r2 = eigen_residual(state, x, 5e-4)
    assert r1 <= 1e-4
    assert 3.5 < r1 / r2 < 4.5


def test_coordinates_must_be_on_ring():
    with pytest.raises(ValueError):
        trig_eigenfunction((1, 0), 1.0, 2.0, [2.5, 0.1])
    with pytest.raises(ValueError):
        trig_eigenfunction((1, 0), 1.0, 2.0, [0.5, 0.5])


def test_okounkov_examples():
    assert verify_okounkov_recursion((1, 0), 1, 0)["deviation"] <= 1e-10
    assert verify_okounkov_recursion((0, 0), 1, 1)["deviation"] <= 1e-8
    # N = 1 base: a monomial against a pure beta integral
    assert verify_okounkov_recursion((3, 0), 1, 2)["deviation"] <= 1e-12


def test_okounkov_point_independence():
    res = verify_okounkov_recursion((2, 1, 0), 2, 1)
    devs = np.abs(np.array(res["ratios"]) - 1)
    assert np.max(devs) <= 10 * max(np.median(devs), 1e-15)


def test_annihilation_contour_is_resolved():
    res = verify_annihilation_integral((1, 0), 2, 0, 5)
    assert res["contour_error"] <= 1e-12 * res["scale"]
    assert abs(res["lhs"]) <= 1e-6 * res["scale"]


def test_bethe_examples():
    L = 2 * math.pi
    free = bethe_quasimomenta((4, 2, 1), 0, L)
    assert free.ks == free.I
    assert bethe_residual(free)["residual"] == 0
    sol = bethe_quasimomenta((0, 3), 1, L)
    assert sol.ks == (1, 2)
    assert np.allclose(sol.momenta(), [1.0, 2.0])
    assert bethe_residual(sol)["residual"] == 0
    # equal labels: the centred formula gives (1, -1)
    pair = bethe_quasimomenta((0, 0), 1, L)
    assert pair.ks == (1, -1)
    res = bethe_residual(pair)
    assert res["residual"] == 0 and res["convention"] == "plus"
    assert res["minus"] != 0


def test_bethe_boost_invariance():
    L = 2 * math.pi
    base = bethe_quasimomenta((5, 2, 2, 0), Fraction(1, 2), L)
    shifted = bethe_quasimomenta((7, 4, 4, 2), Fraction(1, 2), L)
    assert all(b - a == 2 for a, b in zip(base.ks, shifted.ks))
    assert bethe_residual(base)["residual"] == bethe_residual(shifted)["residual"] == 0


def test_bethe_serialises():
    d = bethe_quasimomenta((2, 0), 1, 2 * math.pi).to_dict()
    assert d["k_units"] == ["3", "-1"]
    assert d["partition"] == [2, 0]
