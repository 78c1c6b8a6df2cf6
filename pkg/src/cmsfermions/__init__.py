"""Eigenfunctions of one-dimensional interacting fermions.

Wavefunctions are built by nesting integral creation operators over
interlacing domains; the submodules are importable on their own.
"""

from .errors import (
    InterlacingError,
    NonConvergenceError,
    PoleError,
    SingularityError,
    StencilError,
    ToleranceNotMet,
)
from .jack import Partition, bethe_quasimomenta, jack_P, trig_eigenfunction
from .kernels import BACKEND, annihilation_function, creation_function, mu_lambda
from .potentials import BoundaryCondition, Kind, PotentialSpec
from .quadrature import QuadratureSpec
from .wavefunctions import WaveState, construct_psi, slater, smatrix

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundaryCondition",
    "InterlacingError",
    "Kind",
    "NonConvergenceError",
    "Partition",
    "PoleError",
    "PotentialSpec",
    "QuadratureSpec",
    "SingularityError",
    "StencilError",
    "ToleranceNotMet",
    "WaveState",
    "__version__",
    "annihilation_function",
    "bethe_quasimomenta",
    "construct_psi",
    "creation_function",
    "jack_P",
    "mu_lambda",
    "slater",
    "smatrix",
    "trig_eigenfunction",
]
