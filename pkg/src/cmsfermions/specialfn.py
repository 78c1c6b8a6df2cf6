"""Log-gamma, beta and the Gauss hypergeometric function for complex parameters.

All functions take and return Python ``complex`` values.  Real inputs are
accepted and promoted.
"""

from __future__ import annotations

import cmath
import math

from .errors import NonConvergenceError, PoleError

__all__ = ["log_gamma", "gamma", "rgamma", "beta", "hyp2f1", "hyp2f1_series"]

# Lanczos approximation, g = 7, nine terms.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
# above this argument the direct series is replaced by the 1 - z connection
_SERIES_MAX = 0.8


def _as_complex(z, name="z") -> complex:
    w = complex(z)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise ValueError(f"{name} must be finite, got {z!r}")
    return w


def _is_nonpositive_integer(z: complex, tol: float = 0.0) -> bool:
    if z.imag != 0.0 or z.real > 0.5:
        return False
    return abs(z.real - round(z.real)) <= tol


def _lanczos_log(z: complex) -> complex:
    # valid for Re(z) >= 0.5
    z = z - 1.0
    acc = _LANCZOS_COEFFS[0]
    for k in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def log_gamma(z) -> complex:
    """Logarithm of the gamma function.

    For ``Re(z) >= 0.5`` the Lanczos form is used directly.  Smaller real
    parts are shifted upward with the recurrence ``Γ(z) = Γ(z+n)/Π(z+j)``,
    which keeps the branch continuous away from the negative real axis.
    """
    z = _as_complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"gamma function has a pole at {z.real:g}")
    if z.real >= 0.5:
        return _lanczos_log(z)
    shift = int(math.ceil(0.5 - z.real))
    acc = 0j
    for j in range(shift):
        acc += cmath.log(z + j)
    return _lanczos_log(z + shift) - acc


def gamma(z) -> complex:
    return cmath.exp(log_gamma(z))


def rgamma(z) -> complex:
    """Reciprocal gamma function, exactly zero at the poles of Γ."""
    z = _as_complex(z)
    if _is_nonpositive_integer(z):
        return 0j
    return cmath.exp(-log_gamma(z))


def beta(x, y) -> complex:
    """Euler beta function B(x, y) = Γ(x)Γ(y)/Γ(x+y)."""
    x = _as_complex(x, "x")
    y = _as_complex(y, "y")
    s = x + y
    if _is_nonpositive_integer(s) and not (
        _is_nonpositive_integer(x) or _is_nonpositive_integer(y)
    ):
        return 0j
    return cmath.exp(log_gamma(x) + log_gamma(y) - log_gamma(s))


def hyp2f1_series(a, b, c, z, max_terms: int = 20000, rtol: float = 1e-17) -> complex:
    """Plain Gauss series, no transformations.  Needs ``|z| < 1``."""
    a, b, c = complex(a), complex(b), complex(c)
    term = 1.0 + 0j
    total = 1.0 + 0j
    small = 0
    for n in range(max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
        if term == 0:
            return total
        if abs(term) <= rtol * abs(total):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise NonConvergenceError(
        f"2F1 series did not converge in {max_terms} terms at z={z}"
    )


def _terminating_order(a: complex, b: complex):
    orders = [
        int(round(-p.real)) for p in (a, b) if _is_nonpositive_integer(p)
    ]
    return min(orders) if orders else None


def _finite_sum(a, b, c, z, order) -> complex:
    term = 1.0 + 0j
    total = 1.0 + 0j
    for n in range(order):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
    return total


def _near_one(a, b, c, z) -> complex:
    # 0.5 < z < 1 via the z -> 1 - z connection formula
    d = c - a - b
    if abs(d - round(d.real)) < 1e-6:
        return hyp2f1_series(a, b, c, z, max_terms=400000)
    w = 1.0 - z
    lg_c = log_gamma(c)
    first = rgamma(c - a) * rgamma(c - b)
    if first != 0:
        first *= cmath.exp(lg_c + log_gamma(d))
        first *= hyp2f1(a, b, 1.0 - d, w)
    second = rgamma(a) * rgamma(b)
    if second != 0:
        second *= cmath.exp(lg_c + log_gamma(-d) + d * math.log(w))
        second *= hyp2f1(c - a, c - b, 1.0 + d, w)
    return first + second


def hyp2f1(a, b, c, z: float) -> complex:
    """Gauss hypergeometric function F(a, b; c; z) for real ``z <= 1``.

    Terminating cases (``a`` or ``b`` a nonpositive integer) are summed
    exactly.  For ``z < -0.5`` the Pfaff transformation maps the argument
    into ``(1/3, 1)``; arguments above 0.8 use the ``1 - z`` connection
    formula.
    """
    a = _as_complex(a, "a")
    b = _as_complex(b, "b")
    c = _as_complex(c, "c")
    z = float(z)
    if not math.isfinite(z):
        raise ValueError("z must be finite")
    order = _terminating_order(a, b)
    if _is_nonpositive_integer(c):
        if order is None or order > -int(round(c.real)):
            raise PoleError(f"c = {c.real:g} is a nonpositive integer")
    if order is not None:
        return _finite_sum(a, b, c, z, order)
    if z > 1.0:
        raise ValueError("hyp2f1 is only defined here for real z <= 1")
    if z == 0.0:
        return 1.0 + 0j
    if z == 1.0:
        d = c - a - b
        if d.real <= 0:
            raise NonConvergenceError("F(a,b;c;1) diverges unless Re(c-a-b) > 0")
        return cmath.exp(log_gamma(c) + log_gamma(d)) * rgamma(c - a) * rgamma(c - b)
    if abs(z) <= 0.5:
        return hyp2f1_series(a, b, c, z)
    if z < -0.5:
        w = z / (z - 1.0)
        return (1.0 - z) ** (-a) * hyp2f1(a, c - b, c, w)
    if z <= _SERIES_MAX:
        return hyp2f1_series(a, b, c, z)
    return _near_one(a, b, c, z)
