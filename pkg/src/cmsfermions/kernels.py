"""Symmetric creation and annihilation functions, the interlacing measure
and the fermionic sign determinants.

Every kernel is assembled in log-space: a sum of ``F`` terms plus the
plane-wave phase ``ik(Σx - Σx')``, exponentiated once.  The batched
log-magnitude is computed by a compiled core when available and by numpy
otherwise; ``BACKEND`` names the one in use.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InterlacingError, SingularityError, StencilError
from .potentials import BoundaryCondition, Kind, PotentialSpec, V_array
from .quadrature import QuadratureSpec, integrate_in

try:
    from ._kernels_ext import log_kernel_batch as _log_kernel_compiled
except ImportError:  # pragma: no cover - exercised only without a build
    _log_kernel_compiled = None
from ._kernels_py import log_kernel_batch as _log_kernel_numpy

BACKEND = "cython" if _log_kernel_compiled is not None else "numpy"

__all__ = [
    "BACKEND",
    "Configuration",
    "KernelValue",
    "as_configuration",
    "check_interlacing",
    "kind_code",
    "log_kernel_batch",
    "mu_lambda",
    "mu_lambda_batch",
    "dixon_anderson_exact",
    "dixon_anderson_integral",
    "creation_function",
    "annihilation_function",
    "creation_function_batch",
    "sawtooth",
    "statistical_function_dagger",
    "statistical_function",
    "statistical_domain_ratio",
    "pair_potential_sum",
    "kernel_pde_residual",
]

_KIND_CODES = {Kind.TRIG: 1, Kind.RATIONAL: 2, Kind.HYPERBOLIC: 3, Kind.MORSE: 4, Kind.DELTA: 5}


@dataclass(frozen=True)
class Configuration:
    """Particle coordinates in the canonical sector ``x_1 > x_2 > ...``."""

    coords: tuple

    def __post_init__(self):
        arr = as_configuration(self.coords)
        object.__setattr__(self, "coords", tuple(float(v) for v in arr))

    def __len__(self):
        return len(self.coords)

    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)


@dataclass(frozen=True)
class KernelValue:
    value: complex
    n_from: int
    n_to: int
    k: float

    def __post_init__(self):
        if abs(self.n_to - self.n_from) != 1:
            raise ValueError("a kernel changes the particle number by one")


def as_configuration(x, L: float | None = None) -> np.ndarray:
    """Validate a strictly decreasing coordinate vector (inside ``[0, L)`` on a ring)."""
    if isinstance(x, Configuration):
        x = x.coords
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise ValueError("a configuration is a flat list of coordinates")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coordinates must be finite")
    if np.any(np.diff(arr) >= 0):
        raise ValueError("coordinates must be strictly decreasing")
    if L is not None and arr.size and (arr[-1] < 0 or arr[0] >= L):
        raise ValueError(f"ring coordinates must lie in [0, {L})")
    return arr


def check_interlacing(x, xp) -> tuple[np.ndarray, np.ndarray]:
    """Require ``x_1 > x'_1 > x_2 > ... > x'_N > x_{N+1}``."""
    x = np.asarray(x, dtype=float).ravel()
    xp = np.asarray(xp, dtype=float).ravel()
    if x.size != xp.size + 1:
        raise InterlacingError(f"need len(x) = len(x') + 1, got {x.size} and {xp.size}")
    merged = np.empty(x.size + xp.size)
    merged[0::2] = x
    merged[1::2] = xp
    if np.any(np.diff(merged) >= 0):
        raise InterlacingError("primed coordinates do not interlace the unprimed ones")
    return x, xp


def kind_code(spec: PotentialSpec) -> tuple[int, float, float]:
    """Integer kind, coupling and rate passed to the batched core."""
    kind = spec.kind
    if kind is Kind.TRIG:
        rate = spec.b
    elif kind is Kind.DELTA:
        rate = spec.c
    else:
        rate = spec.a
    return _KIND_CODES[kind], spec.lam, float(rate)


def log_kernel_batch(spec: PotentialSpec, X, XP, backend: str | None = None) -> np.ndarray:
    """Log-magnitude of the kernel for ``X`` of shape ``(P, A)`` against ``XP`` ``(P, M, B)``."""
    code, lam, rate = kind_code(spec)
    X = np.ascontiguousarray(X, dtype=float)
    XP = np.ascontiguousarray(XP, dtype=float)
    backend = backend or BACKEND
    if backend == "cython":
        if _log_kernel_compiled is None:
            raise RuntimeError("compiled core is not available")
        return _log_kernel_compiled(code, lam, rate, X, XP)
    return _log_kernel_numpy(code, lam, rate, X, XP)


# ----------------------------------------------------------------- measure


def _log_vandermonde_abs(Y: np.ndarray) -> np.ndarray:
    n = Y.shape[-1]
    if n < 2:
        return np.zeros(Y.shape[:-1])
    i, j = np.triu_indices(n, 1)
    return np.log(np.abs(Y[..., i] - Y[..., j])).sum(axis=-1)


def mu_lambda_batch(x, XP, lam: float) -> np.ndarray:
    """Interlacing measure at many primed points ``XP`` (shape ``(M, N)``), unchecked.

    ``|Δ_N(x')| / |Δ_{N+1}(x)|^{2λ+1} · Π_{i,j} |x_i - x'_j|^λ``.
    """
    x = np.asarray(x, dtype=float)
    XP = np.asarray(XP, dtype=float)
    with np.errstate(divide="ignore"):
        cross = np.log(np.abs(x[None, :, None] - XP[:, None, :])).sum(axis=(1, 2))
        logv = _log_vandermonde_abs(XP) - (2.0 * lam + 1.0) * _log_vandermonde_abs(x) + lam * cross
    return np.exp(logv)


def mu_lambda(x, xp, lam: float) -> float:
    """Interlacing measure whose integral over the primed sector is x-independent."""
    lam = float(lam)
    if not lam > -1:
        raise ValueError("lambda must exceed -1")
    x, xp = check_interlacing(x, xp)
    return float(mu_lambda_batch(x, xp[None, :], lam)[0])


def dixon_anderson_exact(N: int, lam: float) -> float:
    """``Γ^{N+1}(λ+1) / Γ((N+1)(λ+1))``."""
    return math.exp((N + 1) * math.lgamma(lam + 1) - math.lgamma((N + 1) * (lam + 1)))


def dixon_anderson_integral(x, lam: float, q=None) -> float:
    """Nested quadrature of ``mu_lambda`` over the inner interlacing domain of ``x``."""
    lam = float(lam)
    if not lam > -1:
        raise ValueError("lambda must exceed -1")
    x = as_configuration(x)
    q = (q or QuadratureSpec()).with_exponents(lam, lam)
    return float(integrate_in(lambda XP: mu_lambda_batch(x, XP, lam), x, q))


# ----------------------------------------------------------------- kernels


def _check_distinct(spec: PotentialSpec, *groups):
    if spec.kind is Kind.DELTA:
        return
    pts = np.concatenate([np.ravel(g) for g in groups])
    if spec.kind is Kind.TRIG:
        pts = np.mod(pts, spec.L)
    s = np.sort(pts)
    if s.size > 1 and np.min(np.diff(s)) == 0.0:
        raise SingularityError("two coordinates coincide")
    if spec.kind is Kind.TRIG and s.size > 1 and (s[0] + spec.L - s[-1]) == 0.0:
        raise SingularityError("two coordinates coincide on the ring")


def _kernel(spec, k, x, xp) -> complex:
    x = np.asarray(x, dtype=float).ravel()
    xp = np.asarray(xp, dtype=float).ravel()
    _check_distinct(spec, x, xp)
    logmag = log_kernel_batch(spec, x[None, :], xp[None, None, :])[0, 0]
    phase = float(k) * (x.sum() - xp.sum())
    return complex(math.exp(logmag) * complex(math.cos(phase), math.sin(phase)))


def creation_function(spec: PotentialSpec, k: float, x, xp) -> complex:
    """Symmetric kernel raising the particle number from ``len(xp)`` to ``len(x)``."""
    x = np.asarray(x, dtype=float).ravel()
    xp = np.asarray(xp, dtype=float).ravel()
    if x.size != xp.size + 1:
        raise ValueError("creation needs len(x) = len(x') + 1")
    return _kernel(spec, k, x, xp)


def annihilation_function(spec: PotentialSpec, k: float, x, xp) -> complex:
    """Symmetric kernel lowering the particle number from ``len(xp)`` to ``len(x)``."""
    x = np.asarray(x, dtype=float).ravel()
    xp = np.asarray(xp, dtype=float).ravel()
    if x.size + 1 != xp.size:
        raise ValueError("annihilation needs len(x) + 1 = len(x')")
    return _kernel(spec, k, x, xp)


def creation_function_batch(spec: PotentialSpec, k: float, X, XP, backend=None) -> np.ndarray:
    """Kernel values ``(P, M)`` for ``X`` ``(P, N+1)`` and ``XP`` ``(P, M, N)``; unchecked."""
    X = np.asarray(X, dtype=float)
    XP = np.asarray(XP, dtype=float)
    logmag = log_kernel_batch(spec, X, XP, backend)
    phase = k * (X.sum(axis=-1)[:, None] - XP.sum(axis=-1))
    return np.exp(logmag + 1j * phase)


# ------------------------------------------------------ sign determinants


def sawtooth(x, L: float):
    """``x - nL`` with ``n`` the largest integer not exceeding ``x/L``."""
    return np.asarray(x, dtype=float) - L * np.floor(np.asarray(x, dtype=float) / L)


def _reduce(v, bc, L):
    bc = BoundaryCondition(getattr(bc, "value", bc))
    if bc is BoundaryCondition.PBC:
        if L is None or L <= 0:
            raise ValueError("PBC needs a positive period L")
        return sawtooth(v, L)
    return np.asarray(v, dtype=float)


def statistical_function_dagger(x, xp, bc=BoundaryCondition.SBC, L: float | None = None) -> float:
    """Sign determinant tracking fermionic order for ``N -> N+1``.

    ``2^{-(N+1)}/(N+1)! · det[sgn(x_n - x'_m) | 1]`` with rows ``n = 1..N+1``.
    """
    x = _reduce(np.ravel(x), bc, L)
    xp = _reduce(np.ravel(xp), bc, L)
    n = xp.size
    if x.size != n + 1:
        raise ValueError("need len(x) = len(x') + 1")
    mat = np.ones((n + 1, n + 1))
    mat[:, :n] = np.sign(x[:, None] - xp[None, :])
    pref = 2.0 ** (-(n + 1)) / math.factorial(n + 1)
    return float(pref * np.linalg.det(mat))


def statistical_function(x, xp, bc=BoundaryCondition.SBC, L: float | None = None) -> float:
    """Sign determinant for ``N -> N-1``: ``2^{-N}/N! · det`` of the ``N x N`` matrix
    whose first ``N-1`` rows are ``sgn(x'_m - x_n)`` and whose last row is all ones.
    """
    x = _reduce(np.ravel(x), bc, L)
    xp = _reduce(np.ravel(xp), bc, L)
    n = xp.size
    if x.size + 1 != n:
        raise ValueError("need len(x) + 1 = len(x')")
    mat = np.ones((n, n))
    mat[: n - 1, :] = np.sign(xp[None, :] - x[:, None])
    pref = 2.0 ** (-n) / math.factorial(n)
    return float(pref * np.linalg.det(mat))


def statistical_domain_ratio(x, chi_factors, span: float = 12.0, nodes: int = 48) -> float:
    """Ratio of ``∫ I†·χ`` over all of R^N to ``∫ χ`` over the inner sector.

    ``chi_factors`` is a list of ``N`` one-dimensional callables; the test
    function is their antisymmetrised product.  ``I†`` is constant on each
    product of the gaps between the outer coordinates, so each cell is a
    tensor product of one-dimensional Gauss-Legendre integrals.
    """
    x = as_configuration(x)
    n = x.size - 1
    if len(chi_factors) != n:
        raise ValueError("need one factor per primed coordinate")
    edges = [x[0] + span, *x, x[-1] - span]
    gaps = [(edges[g + 1], edges[g]) for g in range(len(edges) - 1)]
    t, w = np.polynomial.legendre.leggauss(nodes)
    # one-dimensional moments table: moment[g][j] = ∫_gap g of factor j
    moment = np.empty((len(gaps), n))
    for g, (lo, hi) in enumerate(gaps):
        u = 0.5 * (hi + lo) + 0.5 * (hi - lo) * t
        for j, fac in enumerate(chi_factors):
            moment[g, j] = 0.5 * (hi - lo) * np.dot(w, fac(u))
    # midpoint of each gap identifies the sign pattern of the cell
    mids = [0.5 * (lo + hi) for lo, hi in gaps]
    perms = list(_permutations_with_sign(n))

    def cell_integral(cell):
        # ∫ over the cell of the antisymmetrised product; cells where two
        # coordinates share a gap carry the ordered-pair structure, handled
        # by splitting on the order within the gap
        return sum(sgn * np.prod([moment[cell[m], p[m]] for m in range(n)]) for p, sgn in perms)

    total = 0.0
    for cell in np.ndindex(*([len(gaps)] * n)):
        if len(set(cell)) < n:
            # coordinates in a common gap: I† vanishes (equal columns)
            continue
        weight = statistical_function_dagger(x, [mids[c] for c in cell])
        if weight != 0.0:
            total += weight * cell_integral(cell)
    inner = cell_integral(tuple(range(1, n + 1)))
    return float(total / inner)


def _permutations_with_sign(n):
    for p in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        yield p, (-1) ** inv


# ------------------------------------------------------------ kernel PDE


def pair_potential_sum(spec: PotentialSpec, x) -> float:
    """``Σ_{i≠j} V(x_i - x_j)`` over ordered pairs (zero for the δ interaction off contact)."""
    x = np.asarray(x, dtype=float)
    if spec.kind is Kind.DELTA or x.size < 2:
        return 0.0
    i, j = np.triu_indices(x.size, 1)
    return float(2.0 * V_array(spec, x[i] - x[j]).sum())


def _laplacian(fun, pts: np.ndarray, h: float) -> complex:
    centre = fun(pts)
    acc = 0j
    for d in range(pts.size):
        e = np.zeros_like(pts)
        e[d] = h
        acc += fun(pts + e) - 2.0 * centre + fun(pts - e)
    return acc / h**2


def kernel_pde_residual(spec: PotentialSpec, k: float, x, xp, h: float = 1e-3) -> float:
    """Relative finite-difference residual of the creation-kernel equation.

    ``|[H_{N+1}(x) - H_N(x') - k²] a†| / |a†|`` with second-order central
    differences in every coordinate of both sets.
    """
    x = np.asarray(x, dtype=float).ravel()
    xp = np.asarray(xp, dtype=float).ravel()
    check_interlacing(x, xp)
    if not h > 0:
        raise ValueError("h must be positive")
    merged = np.sort(np.concatenate([x, xp]))
    if np.min(np.diff(merged)) <= 2.0 * h:
        raise StencilError("stencil crosses a coordinate coincidence")
    if spec.kind is Kind.TRIG and (merged[-1] - merged[0] >= spec.L - 2.0 * h):
        raise StencilError("stencil wraps around the ring")

    def a_dag_x(pts):
        return creation_function(spec, k, pts, xp)

    def a_dag_xp(pts):
        return creation_function(spec, k, x, pts)

    value = creation_function(spec, k, x, xp)
    lhs = -_laplacian(a_dag_x, x, h) + _laplacian(a_dag_xp, xp, h)
    lhs += (pair_potential_sum(spec, x) - pair_potential_sum(spec, xp)) * value
    return float(abs(lhs - k * k * value) / abs(value))
