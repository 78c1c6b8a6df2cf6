import itertools
import math
from fractions import Fraction

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cmsfermions.jack import Partition, jack_P
from cmsfermions.kernels import creation_function, mu_lambda
from cmsfermions.potentials import Kind, PotentialSpec, eval_f, eval_F
from cmsfermions.specialfn import gamma, hyp2f1, log_gamma
from cmsfermions.wavefunctions import slater, smatrix

coords = st.floats(-3, 3, allow_nan=False)
couplings = st.floats(0.0, 3.0)

SPEC_BUILDERS = {
    Kind.TRIG: lambda lam: PotentialSpec(Kind.TRIG, lam=lam, b=1.0),
    Kind.RATIONAL: lambda lam: PotentialSpec(Kind.RATIONAL, lam=lam),
    Kind.HYPERBOLIC: lambda lam: PotentialSpec(Kind.HYPERBOLIC, lam=lam, a=0.8),
    Kind.MORSE: lambda lam: PotentialSpec(Kind.MORSE, lam=lam, a=0.8),
    Kind.DELTA: lambda lam: PotentialSpec(Kind.DELTA, c=lam),
}


@given(st.sampled_from(list(Kind)), couplings, st.floats(0.01, 3.0))
def test_f_odd_F_even(kind, lam, x):
    spec = SPEC_BUILDERS[kind](lam)
    assume(kind is not Kind.TRIG or abs(math.remainder(x, math.pi)) > 1e-3)
    assert abs(eval_f(spec, x) + eval_f(spec, -x)) <= 1e-12 * max(1.0, abs(eval_f(spec, x)))
    assert abs(eval_F(spec, x) - eval_F(spec, -x)) <= 1e-12 * max(1.0, abs(eval_F(spec, x)))


@given(st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False))
def test_gamma_recurrence(z):
    assume(abs(z.imag) > 1e-3 or z.real > 0.5)
    assume(abs(z) > 1e-3)
    assert abs(gamma(z + 1) / (z * gamma(z)) - 1) < 1e-11
    # the logarithms agree up to a multiple of 2πi
    diff = (log_gamma(z + 1) - log_gamma(z) - np.log(z)) / (2j * math.pi)
    assert abs(diff - round(diff.real)) < 1e-9


@given(st.floats(-0.9, 0.9), st.floats(0.1, 3), st.floats(0.2, 4))
def test_hyp2f1_euler_transformation(z, b, c):
    a = 0.4 + 0.3j
    lhs = hyp2f1(a, b, c, z)
    rhs = (1 - z) ** (c - a - b) * hyp2f1(c - a, c - b, c, z)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


@given(st.lists(coords, min_size=3, max_size=3, unique=True), st.permutations(range(3)))
def test_slater_permutation_sign(x, perm):
    assume(min(abs(a - b) for a, b in itertools.combinations(x, 2)) > 1e-3)
    ks = (0.7, -0.2, 1.4)
    inv = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
    permuted = [x[p] for p in perm]
    assert abs(slater(ks, permuted) - (-1) ** inv * slater(ks, x)) <= 1e-12


@given(st.lists(st.floats(-2, 2), min_size=5, max_size=5, unique=True), couplings,
       st.sampled_from([Kind.RATIONAL, Kind.HYPERBOLIC, Kind.MORSE, Kind.DELTA]), st.floats(-2, 2))
def test_creation_symmetric_within_sets(pts, lam, kind, k):
    pts = sorted(pts, reverse=True)
    assume(min(a - b for a, b in zip(pts, pts[1:])) > 1e-2)
    spec = SPEC_BUILDERS[kind](lam)
    x, xp = np.array(pts[::2]), np.array(pts[1::2])
    ref = creation_function(spec, k, x, xp)
    val = creation_function(spec, k, x[::-1], xp[::-1])
    assert abs(val - ref) <= 1e-12 * abs(ref)


@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3, unique=True), st.floats(0.0, 2.5))
def test_measure_positive(pts, lam):
    pts = sorted(pts, reverse=True)
    assume(min(a - b for a, b in zip(pts, pts[1:])) > 1e-3)
    assert mu_lambda((pts[0], pts[2]), (pts[1],), lam) > 0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=3), st.fractions(Fraction(1, 5), 5),
       st.permutations(range(3)))
def test_jack_symmetric(parts, alpha, perm):
    poly = jack_P(Partition.parse(parts), 3, alpha)
    z = np.array([0.3 + 0.2j, -0.5, 0.9 - 0.1j])
    assert abs(poly(z) - poly(z[list(perm)])) <= 1e-10 * max(1.0, abs(poly(z)))


@given(st.lists(st.integers(0, 9), min_size=1, max_size=5))
def test_partition_round_trip(parts):
    p = Partition.parse(parts)
    assert Partition.from_increasing(p.to_increasing()) == p
    assert Partition.parse(str(p)) == p


@given(st.sampled_from([Kind.HYPERBOLIC, Kind.MORSE]), st.floats(0.0, 3.0), st.floats(-5, 5))
def test_smatrix_unitary(kind, lam, kp):
    assume(abs(kp) > 1e-6)
    s = smatrix(PotentialSpec(kind, lam=lam), kp)
    assert abs(abs(s) - 1) <= 1e-9


@given(st.sampled_from(list(Kind)), couplings)
def test_spec_json_round_trip(kind, lam):
    spec = SPEC_BUILDERS[kind](lam)
    assert PotentialSpec.from_json(spec.to_json()) == spec
