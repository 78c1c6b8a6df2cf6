"""Pair interactions that admit integral creation operators.

Each family is described by an antisymmetric function ``f``, its even
primitive ``F`` and the pair potential ``V = f**2 - f' + C`` where ``C`` is
the constant on the right-hand side of the functional equation

    f(x) f(y) + f(x) f(z) + f(y) f(z) = C,    x + y + z = 0.

==== ==================== ======================= ==================
kind f(x)                 V(x)                    C
==== ==================== ======================= ==================
I    λ b cot(b x)         b²λ(λ+1)/sin²(b x)      b²λ²
II   λ/x                  λ(λ+1)/x²               0
III  a λ coth(a x)        a²λ(λ+1)/sinh²(a x)     -a²λ²
IV   a λ tanh(a x)        -a²λ(λ+1)/cosh²(a x)    -a²λ²
V    c sgn(x)             -2c δ(x)                -c²
==== ==================== ======================= ==================
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import PoleError

__all__ = [
    "Kind",
    "BoundaryCondition",
    "PotentialSpec",
    "eval_f",
    "eval_F",
    "eval_V",
    "delta_strength",
    "functional_constant",
    "functional_equation_residual",
    "family_metadata",
    "F_array",
    "f_array",
    "V_array",
]


class Kind(str, enum.Enum):
    TRIG = "I"
    RATIONAL = "II"
    HYPERBOLIC = "III"
    MORSE = "IV"
    DELTA = "V"

    @classmethod
    def parse(cls, value) -> "Kind":
        if isinstance(value, cls):
            return value
        text = str(value).strip()
        for member in cls:
            if text.upper() == member.value or text.upper() == member.name:
                return member
        raise ValueError(f"unknown interaction kind {value!r}")


class BoundaryCondition(str, enum.Enum):
    SBC = "SBC"
    PBC = "PBC"


@dataclass(frozen=True)
class PotentialSpec:
    """One interaction family with its couplings and boundary condition.

    ``lam`` must exceed -1.  The trigonometric family lives on a ring of
    circumference ``L = π/b``; give either ``b`` or ``L``.  Rational,
    hyperbolic and Morse interactions require scattering boundary
    conditions; the δ interaction accepts either.
    """

    kind: Kind
    lam: float = 0.0
    a: float = 1.0
    b: float | None = None
    c: float = 0.0
    L: float | None = None
    bc: BoundaryCondition | None = None

    def __post_init__(self):
        kind = Kind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        lam = float(self.lam)
        if not math.isfinite(lam) or lam <= -1.0:
            raise ValueError(f"coupling must satisfy lam > -1, got {self.lam}")
        object.__setattr__(self, "lam", lam)
        bc = self.bc
        if bc is None:
            bc = BoundaryCondition.PBC if kind is Kind.TRIG else BoundaryCondition.SBC
        bc = BoundaryCondition(str(getattr(bc, "value", bc)).upper())
        object.__setattr__(self, "bc", bc)

        if kind is Kind.TRIG:
            b, L = self.b, self.L
            if b is None and L is None:
                raise ValueError("trigonometric interaction needs b or L")
            if b is None:
                b = math.pi / float(L)
            if L is None:
                L = math.pi / float(b)
            b, L = float(b), float(L)
            if b <= 0 or L <= 0:
                raise ValueError("b and L must be positive")
            if abs(L * b - math.pi) > 1e-12 * math.pi:
                raise ValueError("trigonometric interaction requires L = pi/b")
            if bc is not BoundaryCondition.PBC:
                raise ValueError("trigonometric interaction only admits PBC")
            object.__setattr__(self, "b", b)
            object.__setattr__(self, "L", L)
        elif kind is Kind.DELTA:
            if bc is BoundaryCondition.PBC:
                if self.L is None or float(self.L) <= 0:
                    raise ValueError("PBC needs a positive period L")
                object.__setattr__(self, "L", float(self.L))
        else:
            if bc is not BoundaryCondition.SBC:
                raise ValueError(f"kind {kind.value} only admits SBC")
            if kind in (Kind.HYPERBOLIC, Kind.MORSE) and float(self.a) <= 0:
                raise ValueError("rate a must be positive")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "c", float(self.c))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "lambda": self.lam,
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "L": self.L,
            "bc": self.bc.value,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def from_dict(cls, data: dict) -> "PotentialSpec":
        return cls(
            kind=data["kind"],
            lam=data.get("lambda", 0.0),
            a=data.get("a", 1.0) if data.get("a") is not None else 1.0,
            b=data.get("b"),
            c=data.get("c", 0.0) if data.get("c") is not None else 0.0,
            L=data.get("L"),
            bc=data.get("bc"),
        )

    @classmethod
    def from_json(cls, text: str) -> "PotentialSpec":
        return cls.from_dict(json.loads(text))


def _check_pole(spec: PotentialSpec, x: float) -> None:
    kind = spec.kind
    if kind in (Kind.RATIONAL, Kind.HYPERBOLIC):
        if x == 0.0:
            raise PoleError(f"kind {kind.value} is singular at x = 0")
    elif kind is Kind.TRIG:
        period = math.pi / spec.b
        r = math.remainder(x, period)
        if abs(r) <= 1e-14 * period:
            raise PoleError("trigonometric interaction is singular at multiples of pi/b")


def f_array(spec: PotentialSpec, x):
    """Vectorised ``f`` without pole checks."""
    x = np.asarray(x, dtype=float)
    lam, kind = spec.lam, spec.kind
    if kind is Kind.TRIG:
        return lam * spec.b / np.tan(spec.b * x)
    if kind is Kind.RATIONAL:
        return lam / x
    if kind is Kind.HYPERBOLIC:
        return spec.a * lam / np.tanh(spec.a * x)
    if kind is Kind.MORSE:
        return spec.a * lam * np.tanh(spec.a * x)
    return spec.c * np.sign(x)


def F_array(spec: PotentialSpec, x):
    """Vectorised ``F`` without pole checks."""
    x = np.asarray(x, dtype=float)
    lam, kind = spec.lam, spec.kind
    if kind is Kind.TRIG:
        return lam * np.log(np.abs(np.sin(spec.b * x)))
    if kind is Kind.RATIONAL:
        return lam * np.log(np.abs(x))
    if kind is Kind.HYPERBOLIC:
        ax = np.abs(spec.a * x)
        with np.errstate(divide="ignore"):
            return lam * (ax + np.log(-np.expm1(-2.0 * ax)) - math.log(2.0))
    if kind is Kind.MORSE:
        ax = np.abs(spec.a * x)
        # log cosh without overflow
        return lam * (ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0))
    return spec.c * np.abs(x)


def V_array(spec: PotentialSpec, x):
    """Vectorised pointwise ``V`` (not defined for the δ interaction)."""
    x = np.asarray(x, dtype=float)
    lam, kind = spec.lam, spec.kind
    g = lam * (lam + 1.0)
    if kind is Kind.TRIG:
        return spec.b**2 * g / np.sin(spec.b * x) ** 2
    if kind is Kind.RATIONAL:
        return g / x**2
    if kind is Kind.HYPERBOLIC:
        return spec.a**2 * g / np.sinh(spec.a * x) ** 2
    if kind is Kind.MORSE:
        return -spec.a**2 * g / np.cosh(spec.a * x) ** 2
    raise ValueError("the delta interaction has no pointwise potential; use delta_strength")


def eval_f(spec: PotentialSpec, x: float) -> float:
    x = float(x)
    _check_pole(spec, x)
    return float(f_array(spec, x))


def eval_F(spec: PotentialSpec, x: float) -> float:
    x = float(x)
    _check_pole(spec, x)
    return float(F_array(spec, x))


def eval_V(spec: PotentialSpec, x: float) -> float:
    if spec.kind is Kind.DELTA:
        raise ValueError("the delta interaction has no pointwise potential; use delta_strength")
    x = float(x)
    _check_pole(spec, x)
    return float(V_array(spec, x))


def delta_strength(spec: PotentialSpec) -> float:
    """Coefficient of δ(x) in the pair potential of the δ interaction."""
    if spec.kind is not Kind.DELTA:
        raise ValueError("delta_strength is only defined for kind V")
    return -2.0 * spec.c


def functional_constant(spec: PotentialSpec) -> float:
    lam, kind = spec.lam, spec.kind
    if kind is Kind.TRIG:
        return spec.b**2 * lam**2
    if kind is Kind.RATIONAL:
        return 0.0
    if kind in (Kind.HYPERBOLIC, Kind.MORSE):
        return -(spec.a**2) * lam**2
    return -(spec.c**2)


def functional_equation_residual(spec: PotentialSpec, x: float, y: float) -> float:
    """``f(x)f(y) + f(x)f(z) + f(y)f(z) - C`` with ``z = -x - y``."""
    x, y = float(x), float(y)
    z = -x - y
    fx, fy, fz = (eval_f(spec, t) for t in (x, y, z))
    return fx * fy + fx * fz + fy * fz - functional_constant(spec)


def family_metadata(spec: PotentialSpec) -> dict:
    """Derived parameters of the underlying elliptic family (informational only)."""
    lam, kind = spec.lam, spec.kind
    if kind is Kind.TRIG:
        return {"beta": -lam * spec.b**2 / 3.0, "kappa": 0.0}
    if kind is Kind.RATIONAL:
        return {"beta": 0.0, "kappa": 0.0}
    if kind is Kind.HYPERBOLIC:
        return {"beta": lam * spec.a**2 / 3.0, "kappa": 0.0}
    if kind is Kind.MORSE:
        return {"beta": lam * spec.a**2 / 3.0, "kappa": complex(0.0, math.pi / 2.0)}
    return {"beta": math.inf, "kappa": 0.0}
