"""N-particle eigenfunctions from iterated creation kernels.

``construct_psi`` evaluates

    ψ_{n+1}(x) = C_n/√(n+1) ∫_{inner sector of x} a†_{k_{n+1}}(x, x') ψ_n(x') dx'

starting from the plane wave ``ψ_1 = e^{i k_1 x}``.  The nested integrals
are evaluated level by level on batches of outer points; each level uses
a Gauss-Jacobi rule whose endpoint exponent matches the kernel (``λ`` for
the singular families, 0 otherwise).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PoleError, ToleranceNotMet
from .jack import Partition, trig_eigenfunction
from .kernels import creation_function_batch
from .potentials import Kind, PotentialSpec, V_array
from .quadrature import QuadratureSpec, gauss_jacobi, reference_rule
from .specialfn import beta, gamma, hyp2f1, log_gamma

__all__ = [
    "QuasimomentumSet",
    "WaveState",
    "slater",
    "normalization_C",
    "construct_psi",
    "construct_psi_batch",
    "trig_partition",
    "two_particle_closed_form",
    "asymptotic_amplitude",
    "smatrix",
    "extract_smatrix_numeric",
    "eigen_residual",
    "momentum_residual",
    "OverlapResult",
    "orthogonality_check_pbc",
]

# largest number of kernel evaluations held in memory at one level
_CHUNK = 2_000_000


@dataclass(frozen=True)
class QuasimomentumSet:
    ks: tuple

    def __post_init__(self):
        ks = tuple(float(k) for k in np.atleast_1d(self.ks))
        if not ks:
            raise ValueError("need at least one quasimomentum")
        if not all(math.isfinite(k) for k in ks):
            raise ValueError("quasimomenta must be finite")
        if len(set(ks)) != len(ks):
            raise ValueError("quasimomenta must be pairwise distinct")
        object.__setattr__(self, "ks", ks)

    def __len__(self):
        return len(self.ks)

    def array(self) -> np.ndarray:
        return np.array(self.ks)


@dataclass(frozen=True)
class WaveState:
    """An eigenstate label: interaction, quasimomenta and the normalization variant.

    ``variant`` selects between the two published forms of the trigonometric
    constant (``"proposition"`` or ``"recursion"``); other kinds ignore it.
    """

    spec: PotentialSpec
    ks: QuasimomentumSet
    variant: str = "proposition"
    normalization: complex = field(init=False)

    def __post_init__(self):
        if not isinstance(self.ks, QuasimomentumSet):
            object.__setattr__(self, "ks", QuasimomentumSet(self.ks))
        if self.variant not in ("proposition", "recursion"):
            raise ValueError("variant must be 'proposition' or 'recursion'")
        ks = self.ks.ks
        total = 1.0 + 0j
        for n in range(1, len(ks)):
            total *= normalization_C(self.spec, ks[: n + 1], self.variant) / math.sqrt(n + 1)
        object.__setattr__(self, "normalization", complex(total))

    @property
    def n(self) -> int:
        return len(self.ks)

    def energy(self) -> float:
        return float(np.sum(self.ks.array() ** 2))

    def momentum(self) -> float:
        return float(np.sum(self.ks.array()))


def slater(ks, x) -> complex:
    """``det[e^{i k_n x_m}] / √(N!)``."""
    ks = np.atleast_1d(np.asarray(getattr(ks, "ks", ks), dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if ks.size != x.size:
        raise ValueError("need as many coordinates as quasimomenta")
    mat = np.exp(1j * np.outer(ks, x))
    return complex(np.linalg.det(mat) / math.sqrt(math.factorial(ks.size)))


# --------------------------------------------------------- normalization


def normalization_C(spec: PotentialSpec, ks, variant: str = "proposition") -> complex:
    """Constant ``C_N`` of the step ``N -> N+1``; ``ks`` holds ``k_1..k_{N+1}``.

    Kind V uses ``Π (i k_i - i k_{N+1})``, which makes the δ interaction
    reproduce the Slater determinant.  For kind I, ``"proposition"``
    carries ``sgn(k_i - k_{N+1})`` and no extra factor, ``"recursion"``
    drops the sign and multiplies by ``√(N+1)``.
    """
    ks = np.asarray(getattr(ks, "ks", ks), dtype=float)
    if ks.size < 2:
        raise ValueError("need at least two quasimomenta")
    N = ks.size - 1
    last = ks[-1]
    diffs = ks[:-1] - last
    if np.any(diffs == 0):
        raise PoleError("coincident quasimomenta")
    lam = spec.lam
    kind = spec.kind
    out = 1.0 + 0j
    if kind is Kind.TRIG:
        L = spec.L
        for d in diffs:
            sgn = 1.0 if variant == "recursion" else math.copysign(1.0, d)
            out *= (2j) ** lam * sgn / beta(L * abs(d) / (2 * math.pi), lam + 1)
        out *= (L / (2j * math.pi)) ** (-N)
        if variant == "recursion":
            out *= math.sqrt(N + 1)
        return complex(out)
    if kind is Kind.RATIONAL:
        out = 1j ** (N * (lam + 1)) / gamma(lam + 1) ** N
        for d in diffs:
            out *= abs(d) ** lam * d
        return complex(out)
    if kind is Kind.HYPERBOLIC:
        a = spec.a
        out = (2 * a) ** N
        for d in diffs:
            out *= 2**lam * math.copysign(1.0, d) / beta(1j * abs(d) / (2 * a), lam + 1)
        return complex(out)
    if kind is Kind.MORSE:
        a = spec.a
        for d in diffs:
            kp = abs(d) / (2 * a)
            out *= 2**lam * 1j * d / hyp2f1(-lam, 1j * kp, 1j * kp + 1, -1.0)
        return complex(out)
    for d in diffs:
        out *= 1j * d
    return complex(out)


# ------------------------------------------------------------ recursion


def _jacobi_exponent(spec: PotentialSpec) -> float:
    if spec.kind in (Kind.TRIG, Kind.RATIONAL, Kind.HYPERBOLIC):
        return spec.lam
    return 0.0


def _tensor_rule(t, W, dim):
    if dim == 0:
        return np.zeros((1, 0)), np.ones(1)
    grids = np.meshgrid(*([t] * dim), indexing="ij")
    wgrid = np.meshgrid(*([W] * dim), indexing="ij")
    T = np.stack([g.ravel() for g in grids], axis=-1)
    Wt = np.prod(np.stack([g.ravel() for g in wgrid], axis=-1), axis=-1)
    return T, Wt


def _psi_level(spec, ks, consts, X, t, W, backend):
    """Sector values of ψ_n at rows of ``X`` (shape ``(P, n)``)."""
    P, n = X.shape
    if n == 1:
        return np.exp(1j * ks[0] * X[:, 0])
    T, Wt = _tensor_rule(t, W, n - 1)
    M = T.shape[0]
    out = np.empty(P, dtype=complex)
    step = max(1, _CHUNK // max(1, M * max(1, len(t)) ** max(0, (n - 2) * (n - 1) // 2)))
    for s in range(0, P, step):
        Xs = X[s : s + step]
        lo, hi = Xs[:, 1:], Xs[:, :-1]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        XP = mid[:, None, :] + half[:, None, :] * T[None, :, :]
        weights = Wt[None, :] * np.prod(half, axis=1)[:, None]
        kern = creation_function_batch(spec, ks[n - 1], Xs, XP, backend)
        inner = _psi_level(spec, ks, consts, XP.reshape(-1, n - 1), t, W, backend)
        out[s : s + step] = consts[n - 1] * np.sum(weights * kern * inner.reshape(kern.shape), axis=1)
    return out


def trig_partition(spec: PotentialSpec, ks) -> tuple[Partition, float]:
    """Partition and boost of the closed-form trigonometric state with these quasimomenta."""
    ks = np.sort(np.asarray(getattr(ks, "ks", ks), dtype=float))[::-1]
    N = ks.size
    lam, L = spec.lam, spec.L
    m = L * ks / (2 * math.pi) - 0.5 * (lam + 1) * (N - 1 - 2 * np.arange(N))
    mu = m - m[-1]
    ints = np.round(mu)
    if np.max(np.abs(mu - ints)) > 1e-9 or np.any(np.diff(ints) > 0):
        raise ValueError("quasimomenta are not on the Bethe lattice of a partition")
    return Partition(tuple(int(v) for v in ints)), -(lam + 1) * (N - 1) / 2 + float(m[-1])


def _sector(x):
    x = np.asarray(x, dtype=float)
    order = np.argsort(-x, axis=-1, kind="stable")
    xs = np.take_along_axis(x, order, axis=-1)
    if np.any(np.diff(xs, axis=-1) >= 0):
        raise ValueError("coincident coordinates")
    N = x.shape[-1]
    inv = np.zeros(x.shape[:-1], dtype=int)
    for i in range(N):
        for j in range(i + 1, N):
            inv += order[..., i] > order[..., j]
    return xs, np.where(inv % 2 == 0, 1.0, -1.0)


def construct_psi_batch(state: WaveState, X, q: QuadratureSpec | None = None,
                        normalized: bool = True, nodes: int | None = None,
                        backend: str | None = None) -> np.ndarray:
    """Values of ψ at rows of ``X`` (shape ``(P, N)``) with a fixed node count, no escalation."""
    spec = state.spec
    ks = state.ks.ks
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != len(ks):
        raise ValueError("need as many coordinates as quasimomenta")
    q = q or QuadratureSpec()
    xs, signs = _sector(X)
    expo = _jacobi_exponent(spec)
    t, W = reference_rule(q.with_exponents(expo, expo), nodes or q.nodes_per_dim)
    consts = [1.0 + 0j]
    for n in range(1, len(ks)):
        c = normalization_C(spec, ks[: n + 1], state.variant) if normalized else 1.0
        consts.append(c / math.sqrt(n + 1))
    vals = _psi_level(spec, ks, consts, xs, np.asarray(t), np.asarray(W), backend)
    return vals * signs


def construct_psi(state: WaveState, x, q: QuadratureSpec | None = None,
                  normalized: bool = True, method: str = "auto") -> complex:
    """Eigenfunction value at ``x`` (any ordering; other sectors get the permutation sign).

    For the trigonometric family ``method="auto"`` uses the closed Jack form
    scaled to the recursion normalization; ``method="quadrature"`` forces
    the nested integrals.  Elsewhere the node count doubles from
    ``q.nodes_per_dim`` until successive values agree to ``q.rel_tol``.
    """
    spec = state.spec
    q = q or QuadratureSpec()
    x = np.asarray(x, dtype=float).ravel()
    if spec.kind is Kind.TRIG and method == "auto":
        return _trig_closed(state, x, normalized)
    if method not in ("auto", "quadrature"):
        raise ValueError("method must be 'auto' or 'quadrature'")
    if len(x) == 1:
        return complex(np.exp(1j * state.ks.ks[0] * x[0]))
    n = q.nodes_per_dim
    prev = construct_psi_batch(state, x[None, :], q, normalized, n)[0]
    while True:
        n2 = 2 * n
        if n2 > q.max_nodes:
            raise ToleranceNotMet(
                f"wavefunction did not converge to rel_tol={q.rel_tol:g}", estimate=prev
            )
        cur = construct_psi_batch(state, x[None, :], q, normalized, n2)[0]
        if abs(cur - prev) <= q.rel_tol * max(abs(cur), 1e-300):
            return complex(cur)
        prev, n = cur, n2


def _trig_closed(state: WaveState, x, normalized: bool) -> complex:
    # the recursion reproduces Δ^{λ+1} z^K P_n up to the factor below
    spec = state.spec
    part, boost = trig_partition(spec, state.ks)
    xs, sign = _sector(x[None, :])
    value = trig_eigenfunction(part, spec.lam, spec.L, xs[0], statistics="fermionic", boost=boost)
    return complex(sign[0] * value * _trig_scale(state, normalized))


def _trig_scale(state: WaveState, normalized: bool) -> complex:
    """Ratio between the recursion output and the closed Jack form.

    With the ``"recursion"`` constants every creation step maps the closed
    form onto itself times ``i^λ`` per pair (the kernel uses real
    ``|sin|^λ`` factors); other choices differ by the ratio of step constants.
    """
    spec = state.spec
    ks = np.sort(np.asarray(state.ks.ks))[::-1]
    N = ks.size
    scale = cmath.exp(0.25j * math.pi * spec.lam * N * (N - 1))
    for n in range(1, len(ks)):
        ref = normalization_C(spec, ks[: n + 1], "recursion")
        if normalized:
            used = normalization_C(spec, state.ks.ks[: n + 1], state.variant)
        else:
            used = 1.0
        scale *= used / ref
    return scale


# --------------------------------------------------- two-particle forms


def _z(spec, x):
    return math.exp(2 * spec.a * x)


def two_particle_closed_form(spec: PotentialSpec, ks, x) -> complex:
    """Two-particle state of the hyperbolic or Morse family in ``z = e^{2ax}`` variables.

    ``(C_1/√2)(e^{ik_2(x_1+x_2)}/2a) ∫_{z_2}^{z_1} z'^{ik'-λ-1} |z_1 ∓ z'|^λ |z' ∓ z_2|^λ dz'
    / (2|z_1 ∓ z_2|)^λ`` with ``k' = (k_1-k_2)/2a``.  The hyperbolic integral
    is the Euler form of 2F1; the Morse one is integrated numerically.
    """
    if spec.kind not in (Kind.HYPERBOLIC, Kind.MORSE):
        raise ValueError("closed form exists for the hyperbolic and Morse families only")
    k1, k2 = (float(v) for v in ks)
    x = np.asarray(x, dtype=float).ravel()
    if x.size != 2:
        raise ValueError("need two coordinates")
    sign = 1.0
    if x[0] < x[1]:
        x, sign = x[::-1], -1.0
    if x[0] == x[1]:
        return 0j
    a, lam = spec.a, spec.lam
    kp = (k1 - k2) / (2 * a)
    C1 = normalization_C(spec, (k1, k2))
    pre = C1 / math.sqrt(2) * cmath.exp(1j * k2 * (x[0] + x[1])) / (2 * a)
    if spec.kind is Kind.HYPERBOLIC:
        # substitute z' = z_1(1 - w t), w = 1 - z_2/z_1, and factor z_1
        s = 1j * kp - lam
        lw = math.log(-math.expm1(-2 * a * (x[0] - x[1])))  # log w
        log_int = (
            (2 * lam + 1) * (2 * a * x[0] + lw)
            + (s - 1) * 2 * a * x[0]
            + log_gamma(lam + 1) * 2
            - log_gamma(2 * lam + 2)
        )
        F = hyp2f1(1 - s, lam + 1, 2 * lam + 2, math.exp(lw))
        log_den = lam * (math.log(2) + 2 * a * x[0] + lw)
        return complex(sign * pre * cmath.exp(log_int - log_den) * F)
    integral = _morse_integral(kp, lam, a, x[0], x[1])
    log_den = lam * (math.log(2) + math.log(_z(spec, x[0]) + _z(spec, x[1])))
    return complex(sign * pre * integral * math.exp(-log_den))


def _morse_integral(kp, lam, a, x1, x2, panel: float = 0.25, order: int = 24):
    # ∫_{z2}^{z1} z'^{ik'-λ-1} (z1+z')^λ (z'+z2)^λ dz' on panels uniform in log z'
    z1, z2 = math.exp(2 * a * x1), math.exp(2 * a * x2)
    lo, hi = math.log(z2), math.log(z1)
    count = max(1, int(math.ceil((hi - lo) / panel)))
    edges = np.linspace(lo, hi, count + 1)
    t, w = gauss_jacobi(order, 0.0, 0.0)
    total = 0j
    for e0, e1 in zip(edges[:-1], edges[1:]):
        # geometric panel in z: z' from e^{e0} to e^{e1}, Gauss-Legendre in z'
        za, zb = math.exp(e0), math.exp(e1)
        zz = 0.5 * (za + zb) + 0.5 * (zb - za) * t
        f = np.exp((1j * kp - lam - 1) * np.log(zz)) * (z1 + zz) ** lam * (zz + z2) ** lam
        total += 0.5 * (zb - za) * np.dot(w, f)
    return complex(total)


def asymptotic_amplitude(spec: PotentialSpec, ks) -> complex:
    """Predicted coefficient of ``e^{ik_1x_1+ik_2x_2}`` far from the interaction region."""
    k1, k2 = (float(v) for v in ks)
    a, lam = spec.a, spec.lam
    kp = (k1 - k2) / (2 * a)
    C1 = normalization_C(spec, (k1, k2))
    if spec.kind is Kind.HYPERBOLIC:
        return complex(C1 / math.sqrt(2) * beta(1j * kp, lam + 1) / (2 ** (lam + 1) * a))
    if spec.kind is Kind.MORSE:
        F = hyp2f1(-lam, 1j * kp, 1j * kp + 1, -1.0)
        return complex(C1 / math.sqrt(2) * F / (2**lam * 1j * (k1 - k2)))
    raise ValueError("asymptotic amplitude is tabulated for kinds III and IV")


def smatrix(spec: PotentialSpec, kprime: float) -> complex:
    """Two-body scattering amplitude as a function of ``k' = (k_1-k_2)/2a``."""
    kp = float(kprime)
    lam = spec.lam
    if spec.kind is Kind.DELTA:
        return -1.0 + 0j
    if spec.kind not in (Kind.HYPERBOLIC, Kind.MORSE):
        raise ValueError("scattering amplitude is tabulated for kinds III, IV and V")
    s3 = -cmath.exp(
        log_gamma(1 - 1j * kp) + log_gamma(lam + 1 + 1j * kp)
        - log_gamma(1 + 1j * kp) - log_gamma(lam + 1 - 1j * kp)
    )
    if spec.kind is Kind.HYPERBOLIC:
        return complex(s3)
    num = cmath.sin(math.pi * (lam + 1)) + cmath.sin(1j * math.pi * kp)
    den = cmath.sin(math.pi * (lam + 1 - 1j * kp))
    return complex(s3 * num / den)


def extract_smatrix_numeric(spec: PotentialSpec, ks, ratio: float = 1e4,
                            q: QuadratureSpec | None = None, psi=None) -> dict:
    """Fit ``A e^{ik_1x_1+ik_2x_2} + B e^{ik_1x_2+ik_2x_1}`` at two far-separated points.

    The separations are ``d`` with ``e^{2ad} = ratio`` and ``d + π/(2|k_1-k_2|)``.
    ``psi`` defaults to :func:`construct_psi`.  Returns ``A``, ``B`` and ``S = B/A``.
    """
    if ratio < 1e3:
        raise ValueError("ratio must be at least 1e3")
    k1, k2 = (float(v) for v in ks)
    if k1 == k2:
        raise ValueError("quasimomenta must differ")
    d0 = math.log(ratio) / (2 * spec.a)
    dk = k1 - k2
    seps = (d0, d0 + math.pi / (2 * abs(dk)))
    if psi is None:
        state = WaveState(spec, QuasimomentumSet((k1, k2)))
        q = q or QuadratureSpec(rel_tol=1e-12)

        def psi(x):
            return construct_psi(state, x, q)

    rows, rhs = [], []
    for d in seps:
        x = (0.5 * d, -0.5 * d)
        rows.append([cmath.exp(1j * (k1 * x[0] + k2 * x[1])), cmath.exp(1j * (k1 * x[1] + k2 * x[0]))])
        rhs.append(psi(np.array(x)))
    mat = np.array(rows)
    if abs(np.linalg.det(mat)) < 1e-8:
        raise ValueError("ill-conditioned fit; separations too close")
    A, B = np.linalg.solve(mat, np.array(rhs))
    return {"A": complex(A), "B": complex(B), "S": complex(B / A)}


# ---------------------------------------------------------- residuals


def _potential_sum(spec, X):
    X = np.asarray(X, dtype=float)
    N = X.shape[-1]
    if spec.kind is Kind.DELTA or N < 2:
        return np.zeros(X.shape[:-1])
    i, j = np.triu_indices(N, 1)
    return 2.0 * V_array(spec, X[..., i] - X[..., j]).sum(axis=-1)


def _stencil_values(state, x, h, q, normalized=True):
    N = x.size
    pts = [x]
    for d in range(N):
        e = np.zeros(N)
        e[d] = h
        pts.extend([x + e, x - e])
    pts = np.array(pts)
    if state.spec.kind is Kind.TRIG:
        return np.array([construct_psi(state, p, q, normalized) for p in pts])
    return construct_psi_batch(state, pts, q, normalized, q.nodes_per_dim)


def _check_stencil(x, h):
    gaps = -np.diff(np.sort(x)[::-1])
    if gaps.size and np.min(gaps) <= 2 * h:
        from .errors import StencilError

        raise StencilError("stencil crosses a coordinate coincidence")


def eigen_residual(state: WaveState, x, h: float = 1e-3, q: QuadratureSpec | None = None) -> float:
    """``|(-Σ∂² + ΣV - Σk²)ψ| / |ψ|`` by central differences."""
    q = q or QuadratureSpec(nodes_per_dim=48)
    x = np.asarray(x, dtype=float).ravel()
    _check_stencil(x, h)
    vals = _stencil_values(state, x, h, q)
    centre = vals[0]
    lap = sum(vals[1 + 2 * d] - 2 * centre + vals[2 + 2 * d] for d in range(x.size)) / h**2
    pot = float(_potential_sum(state.spec, x))
    return float(abs(-lap + pot * centre - state.energy() * centre) / abs(centre))


def momentum_residual(state: WaveState, x, h: float = 1e-3, q: QuadratureSpec | None = None) -> float:
    """``|(-iΣ∂ - Σk)ψ| / |ψ|`` by central differences."""
    q = q or QuadratureSpec(nodes_per_dim=48)
    x = np.asarray(x, dtype=float).ravel()
    _check_stencil(x, h)
    vals = _stencil_values(state, x, h, q)
    centre = vals[0]
    grad = sum(vals[1 + 2 * d] - vals[2 + 2 * d] for d in range(x.size)) / (2 * h)
    return float(abs(-1j * grad - state.momentum() * centre) / abs(centre))


# -------------------------------------------------------- orthogonality


@dataclass(frozen=True)
class OverlapResult:
    overlap: complex
    norm_a: float
    norm_b: float

    @property
    def normalized(self) -> float:
        return abs(self.overlap) / math.sqrt(self.norm_a * self.norm_b)


def orthogonality_check_pbc(spec: PotentialSpec, partitions, q: QuadratureSpec | None = None,
                            grid: int = 64) -> OverlapResult:
    """Overlap ``∫_{[0,L)^2} conj(ψ_{n'}) ψ_n`` of two trigonometric two-particle states.

    Integer ``λ`` makes the integrand a smooth periodic function, for which
    the midpoint rule on a ``grid x grid`` lattice is spectrally accurate.
    """
    if spec.kind is not Kind.TRIG:
        raise ValueError("orthogonality check is for the trigonometric family")
    na, nb = (Partition.parse(p) for p in partitions)
    if len(na) != 2 or len(nb) != 2:
        raise ValueError("partitions must have two entries")
    L = spec.L
    u = (np.arange(grid) + 0.5) * (L / grid)
    X1, X2 = np.meshgrid(u, u, indexing="ij")
    mask = X1 != X2
    pts = np.stack([X1[mask], X2[mask]], axis=-1)

    def values(part):
        return np.array([trig_eigenfunction(part, spec.lam, L, p, "fermionic") for p in pts])

    va, vb = values(na), values(nb)
    cell = (L / grid) ** 2
    overlap = complex(np.sum(np.conj(vb) * va) * cell)
    return OverlapResult(overlap, float(np.sum(np.abs(va) ** 2) * cell), float(np.sum(np.abs(vb) ** 2) * cell))
