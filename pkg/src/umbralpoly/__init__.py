"""Umbral-classical orthogonal polynomials: moments, operators and verifiers."""

__version__ = "0.1.0"

from .errors import (
    DegenerateFunctionalError,
    InconsistentSystemError,
    InvalidParameterError,
    LatticeCollisionError,
    ModeMismatchError,
    NumericallySingularError,
    RecurrenceBreakdownError,
    SigmaDomainError,
    UmbralError,
    ZeroDivisionFieldError,
)
from .moments import MomentSequence, hankel_determinants, moments_from_ops, moments_from_recurrence
from .orthopoly import MonicPolySystem, gram_check, monic_ops_from_moments, ops_from_recurrence
from .polynomial import Polynomial
from .scalars import EXACT, FLOAT, Tolerance
from .umbral import (
    RaisingOperator,
    UmbralDerivative,
    build_local_D,
    christoffel_factor,
    construct_R,
    derived_polys,
    eigen_check,
    equivalence_transform,
    is_umbral_classical,
    k_coefficient_check,
    min_linear_recurrence,
    normalize_profile,
    symmetry_check,
    verify_main_system,
)
