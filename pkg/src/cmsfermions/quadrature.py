"""Quadrature over interlacing domains.

The integration regions used throughout are products of intervals whose
ends are fixed by an outer configuration ``x`` (strictly decreasing):

* inner domain for ``len(x) == N + 1``: ``x'_n`` in ``(x_{n+1}, x_n)``;
* outer domain for ``len(x) == N - 1``: ``x'_1`` in ``(x_1, X0)``,
  ``x'_n`` in ``(x_n, x_{n-1})`` and ``x'_N`` in ``(X1, x_{N-1})``, with
  ``(X0, X1) = (L, 0)`` on a ring and ``(+inf, -inf)`` on the line.

Integrands are always passed in full.  With the Gauss-Jacobi scheme the
declared endpoint exponents are divided out at the nodes and carried by
the weights, so integrable power singularities cost nothing extra.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import NonConvergenceError, ToleranceNotMet

__all__ = [
    "QuadratureSpec",
    "OnShellResult",
    "gauss_jacobi",
    "tanh_sinh",
    "reference_rule",
    "interval_rule",
    "product_rule",
    "in_domain_intervals",
    "out_domain_intervals",
    "integrate_in",
    "integrate_out_pbc",
    "integrate_periodic_box",
    "damped_half_line",
    "integrate_out_sbc_regularized",
    "eps_limit",
    "regularized_limit",
    "DEFAULT_EPS",
]

# five halvings keep the Richardson remainder near 1e-7 for unit-scale momenta
DEFAULT_EPS = (0.1, 0.05, 0.025, 0.0125, 0.00625)

SCHEMES = ("gauss-jacobi", "tanh-sinh")


@dataclass(frozen=True)
class QuadratureSpec:
    scheme: str = "gauss-jacobi"
    nodes_per_dim: int = 24
    jacobi_alpha: float = 0.0
    jacobi_beta: float = 0.0
    rel_tol: float = 1e-10
    max_nodes: int = 192

    def __post_init__(self):
        scheme = str(self.scheme).lower().replace("_", "-")
        if scheme in ("gaussjacobi", "gj"):
            scheme = "gauss-jacobi"
        if scheme in ("tanhsinh", "ts"):
            scheme = "tanh-sinh"
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        object.__setattr__(self, "scheme", scheme)
        if int(self.nodes_per_dim) < 2:
            raise ValueError("nodes_per_dim must be at least 2")
        object.__setattr__(self, "nodes_per_dim", int(self.nodes_per_dim))
        if self.jacobi_alpha <= -1 or self.jacobi_beta <= -1:
            raise ValueError("Jacobi exponents must exceed -1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if int(self.max_nodes) < self.nodes_per_dim:
            raise ValueError("max_nodes must be at least nodes_per_dim")
        object.__setattr__(self, "max_nodes", int(self.max_nodes))

    def with_exponents(self, alpha: float, beta: float | None = None) -> "QuadratureSpec":
        beta = alpha if beta is None else beta
        return QuadratureSpec(
            self.scheme, self.nodes_per_dim, float(alpha), float(beta), self.rel_tol, self.max_nodes
        )

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "nodes_per_dim": self.nodes_per_dim,
            "jacobi_alpha": self.jacobi_alpha,
            "jacobi_beta": self.jacobi_beta,
            "rel_tol": self.rel_tol,
            "max_nodes": self.max_nodes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "QuadratureSpec":
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "QuadratureSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class OnShellResult:
    """An ε-regularised integral that grows like ``residue/ε``.

    ``residue`` multiplies the δ-function that the limit produces;
    ``finite`` is the ε-independent remainder.
    """

    residue: complex
    finite: complex


# ---------------------------------------------------------------- rules


@lru_cache(maxsize=256)
def gauss_jacobi(n: int, alpha: float, beta: float):
    """Nodes and weights for ``∫_{-1}^{1} (1-t)^alpha (1+t)^beta g(t) dt``.

    Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix.
    """
    if n < 1:
        raise ValueError("need at least one node")
    a, b = float(alpha), float(beta)
    k = np.arange(n, dtype=float)
    s = 2.0 * k + a + b
    with np.errstate(invalid="ignore", divide="ignore"):
        diag = (b * b - a * a) / (s * (s + 2.0))
    if abs(a + b) < 1e-14:
        diag[0] = (b - a) / (a + b + 2.0)
    kk = k[1:]
    ss = 2.0 * kk + a + b
    off = np.sqrt(
        4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) / (ss**2 * (ss + 1.0) * (ss - 1.0))
    )
    if n > 1 and abs(a + b + 1.0) < 1e-14:
        # k = 1 term has a removable 0/0 when a + b = -1
        off[0] = math.sqrt(4.0 * (1 + a) * (1 + b) / ((2 + a + b) ** 2 * (3 + a + b)))
    jac = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    nodes, vecs = np.linalg.eigh(jac)
    mu0 = math.exp(
        (a + b + 1.0) * math.log(2.0)
        + math.lgamma(a + 1.0)
        + math.lgamma(b + 1.0)
        - math.lgamma(a + b + 2.0)
    )
    weights = mu0 * vecs[0, :] ** 2
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=64)
def tanh_sinh(n: int):
    """Double-exponential rule on ``[-1, 1]`` with about ``n`` nodes."""
    half = max(1, n // 2)
    tmax = 3.15
    h = tmax / half
    k = np.arange(-half, half + 1, dtype=float) * h
    u = 0.5 * math.pi * np.sinh(k)
    nodes = np.tanh(u)
    weights = 0.5 * math.pi * h * np.cosh(k) / np.cosh(u) ** 2
    keep = np.abs(nodes) < 1.0
    nodes, weights = nodes[keep], weights[keep]
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def reference_rule(spec: QuadratureSpec, n: int | None = None):
    """Nodes ``t`` on [-1, 1] and weights ``W`` for full integrands.

    ``∫_{-1}^{1} g(t) dt ≈ Σ W_j g(t_j)``.  For Gauss-Jacobi the declared
    weight function is divided out of ``W``.
    """
    n = spec.nodes_per_dim if n is None else int(n)
    if spec.scheme == "tanh-sinh":
        return tanh_sinh(n)
    t, w = gauss_jacobi(n, spec.jacobi_alpha, spec.jacobi_beta)
    W = w / ((1.0 - t) ** spec.jacobi_alpha * (1.0 + t) ** spec.jacobi_beta)
    return t, W


def interval_rule(lo: float, hi: float, t, W):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return mid + half * np.asarray(t), half * np.asarray(W)


def product_rule(intervals: Sequence[tuple[float, float]], t, W):
    """Tensor-product nodes ``(M, D)`` and weights ``(M,)`` over intervals."""
    dim = len(intervals)
    if dim == 0:
        return np.zeros((1, 0)), np.ones(1)
    pts, wts = zip(*(interval_rule(lo, hi, t, W) for lo, hi in intervals))
    grids = np.meshgrid(*pts, indexing="ij")
    wgrid = np.meshgrid(*wts, indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.prod(np.stack([g.ravel() for g in wgrid], axis=-1), axis=-1)
    return nodes, weights


def _strictly_decreasing(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if np.any(np.diff(x) >= 0):
        raise ValueError("outer coordinates must be strictly decreasing")
    return x


def in_domain_intervals(x):
    x = _strictly_decreasing(x)
    return [(x[n + 1], x[n]) for n in range(len(x) - 1)]


def out_domain_intervals(x, upper: float, lower: float):
    x = _strictly_decreasing(x)
    bounds = [upper, *x, lower]
    return [(bounds[d + 1], bounds[d]) for d in range(len(bounds) - 1)]


# ------------------------------------------------------------ escalation


def _escalate(evaluate: Callable[[int], complex], spec: QuadratureSpec):
    # evaluate(n) returns (value, sum of |w f|); the latter sets a
    # cancellation floor so that integrals which vanish can converge
    n = spec.nodes_per_dim
    prev, _ = evaluate(n)
    while True:
        n2 = 2 * n
        if n2 > spec.max_nodes:
            raise ToleranceNotMet(
                f"no convergence to rel_tol={spec.rel_tol:g} with {n} nodes per dimension",
                estimate=prev,
            )
        cur, mass = evaluate(n2)
        scale = max(abs(cur), abs(prev))
        if abs(cur - prev) <= max(spec.rel_tol * scale, 1e-14 * mass):
            return cur
        prev, n = cur, n2


def _apply(f, nodes, weights):
    vals = np.asarray(f(nodes))
    if vals.shape != weights.shape:
        vals = np.broadcast_to(vals, weights.shape)
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand is not finite at an interior node")
    contrib = weights * vals
    total = np.sum(contrib)
    mass = float(np.sum(np.abs(contrib)))
    return (complex(total) if np.iscomplexobj(total) else float(total)), mass


def integrate_in(f, x, spec: QuadratureSpec | None = None):
    """Integrate ``f`` over the inner interlacing domain of ``x``.

    ``f`` maps an ``(M, N)`` array of primed configurations to ``M`` values.
    """
    spec = spec or QuadratureSpec()
    intervals = in_domain_intervals(x)

    def evaluate(n):
        t, W = reference_rule(spec, n)
        nodes, weights = product_rule(intervals, t, W)
        return _apply(f, nodes, weights)

    return _escalate(evaluate, spec)


def integrate_out_pbc(f, x, L: float, spec: QuadratureSpec | None = None):
    """Integrate ``f`` over the outer domain on a ring of circumference ``L``."""
    spec = spec or QuadratureSpec()
    x = np.asarray(x, dtype=float).ravel()
    if x.size and (x[0] >= L or x[-1] <= 0):
        raise ValueError("ring coordinates must lie strictly inside (0, L)")
    intervals = out_domain_intervals(x, float(L), 0.0)

    def evaluate(n):
        t, W = reference_rule(spec, n)
        nodes, weights = product_rule(intervals, t, W)
        return _apply(f, nodes, weights)

    return _escalate(evaluate, spec)


def integrate_periodic_box(f, L: float, dim: int, n: int = 64):
    """Midpoint rule on ``[0, L)^dim``; spectrally exact for smooth periodic ``f``."""
    u = (np.arange(n) + 0.5) * (L / n)
    grids = np.meshgrid(*([u] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.full(pts.shape[0], (L / n) ** dim)
    return _apply(f, pts, weights)[0]


# ------------------------------------------------------- line, ε-damped


@lru_cache(maxsize=8)
def _legendre(n: int):
    return gauss_jacobi(n, 0.0, 0.0)


def _damped_rule(start: float, direction: int, eps: float, rel_tol: float,
                 panel: float = 1.0, order: int = 16):
    # e^{-eps u} falls below rel_tol beyond u = log(1/rel_tol)/eps
    length = math.log(1.0 / rel_tol) / eps
    count = max(1, int(math.ceil(length / panel)))
    t, w = _legendre(order)
    edges = np.arange(count, dtype=float) * panel
    u = (edges[:, None] + 0.5 * panel * (t[None, :] + 1.0)).ravel()
    wu = np.tile(0.5 * panel * w, count)
    damp = np.exp(-eps * u)
    return start + direction * u, wu * damp, count, order


def damped_half_line(g, start: float, direction: int, eps: float, rel_tol: float = 1e-10):
    """``∫ g(x') e^{-eps |x' - start|} dx'`` over the ray leaving ``start``.

    ``direction`` is +1 for ``(start, inf)`` and -1 for ``(-inf, start)``.
    Raises when the damped tail does not decay (integrand grows faster
    than the damping).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    pts, wts, count, order = _damped_rule(start, direction, eps, rel_tol)
    vals = np.asarray(g(pts))
    contrib = wts * vals
    total = complex(np.sum(contrib))
    tail = complex(np.sum(contrib[-order * max(1, count // 20):]))
    if abs(tail) > max(1e3 * rel_tol * abs(total), 1e-300):
        raise NonConvergenceError("integrand is not damped by the eps prescription")
    return total


def integrate_out_sbc_regularized(f, x, eps: float, spec: QuadratureSpec | None = None,
                                  anchor: float = 0.0):
    """ε-damped integral over the outer domain on the line.

    ``f`` is either a callable on ``(M, N)`` node arrays (practical for
    ``N = 1``) or a sequence of separable terms, each a sequence of ``N``
    one-dimensional callables whose product is the term.  Plane-wave
    integrands are sums of such products.  The unbounded directions are
    damped by ``exp(-eps * distance)`` from the nearest finite end; with
    no outer coordinates the single line integral is damped about
    ``anchor``.
    """
    spec = spec or QuadratureSpec()
    x = np.asarray(x, dtype=float).ravel()
    if x.size:
        _strictly_decreasing(x)
    dim = x.size + 1
    tol = min(spec.rel_tol, 1e-10)

    def rule(d):
        if dim == 1:
            p1, w1, *_ = _damped_rule(anchor, 1, eps, tol)
            p2, w2, *_ = _damped_rule(anchor, -1, eps, tol)
            return np.concatenate([p1, p2]), np.concatenate([w1, w2])
        if d == 0:
            return _damped_rule(x[0], 1, eps, tol)[:2]
        if d == dim - 1:
            return _damped_rule(x[-1], -1, eps, tol)[:2]
        t, W = reference_rule(spec, max(spec.nodes_per_dim, 32))
        return interval_rule(x[d], x[d - 1], t, W)

    rules = [rule(d) for d in range(dim)]
    if callable(f):
        size = math.prod(len(p) for p, _ in rules)
        if size > 20_000_000:
            raise ValueError("tensor grid too large; pass the integrand as separable terms")
        grids = np.meshgrid(*[p for p, _ in rules], indexing="ij")
        wgrid = np.meshgrid(*[w for _, w in rules], indexing="ij")
        nodes = np.stack([g.ravel() for g in grids], axis=-1)
        weights = np.prod(np.stack([g.ravel() for g in wgrid], axis=-1), axis=-1)
        return complex(np.sum(weights * np.asarray(f(nodes))))
    total = 0j
    for term in f:
        if len(term) != dim:
            raise ValueError(f"each separable term needs {dim} factors")
        prod = 1.0 + 0j
        for (pts, wts), factor in zip(rules, term):
            prod *= complex(np.sum(wts * np.asarray(factor(pts))))
        total += prod
    return total


def eps_limit(values: dict):
    """Limit ε → 0 from regularised values at three or more ε.

    A fit of ``R/ε + c0 + c1 ε + ...`` decides whether the integral grows
    like ``1/ε``.  If the pole term dominates at the smallest ε the
    integral carries a δ-function and an :class:`OnShellResult` is
    returned; otherwise the Richardson limit of ``c0 + c1 ε + c2 ε² + ...``.
    """
    eps = np.array(sorted(values), dtype=float)
    if eps.size < 3:
        raise ValueError("need at least three eps values")
    vals = np.array([values[e] for e in eps], dtype=complex)
    powers = np.arange(eps.size - 1)
    pole_design = np.column_stack([1.0 / eps, eps[:, None] ** powers])
    residue, finite = np.linalg.solve(pole_design, vals)[:2]
    if abs(residue) / eps[0] > 0.1 * abs(vals[0]):
        return OnShellResult(complex(residue), complex(finite))
    reg_design = eps[:, None] ** np.arange(eps.size)
    return complex(np.linalg.solve(reg_design, vals)[0])


def regularized_limit(evaluate: Callable[[float], complex], eps_values=DEFAULT_EPS):
    """Evaluate ``evaluate(eps)`` on a halving sequence and take the limit."""
    return eps_limit({float(e): evaluate(float(e)) for e in eps_values})
