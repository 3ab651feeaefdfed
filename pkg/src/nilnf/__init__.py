"""Normal forms of vector fields with nilpotent linear part.

Exact arithmetic over rationals extended by square roots, sl2 chain
decompositions of graded polynomial spaces, the box-operator solve, the
Newton-doubling iterated cohomological equation and checkers for the
convergence condition ``V = N + f N*``.
"""

from .scalar import EXACT, ONE, ZERO, RadScalar, ScalarMode, float_mode, reduce_radical, sqrt_rational
from .poly import Poly, fischer_inner, normalized_inner, norm_sq
from .vfield import VectorField, lie_bracket, rnorm, conjugate_truncated, pushforward_truncated
from .sl2 import JordanType, Sl2Triple, build_triple, decompose
from .cohom import box_solve, iterated_solve, solve_homological, structured_solve
from .normalform import (
    check_condition,
    first_integrals,
    first_integrals_of_field,
    newton_step,
    normalize_degreewise,
    normalize_newton,
    radii_sequence,
)

__version__ = "0.1.0"

__all__ = [
    "EXACT",
    "ONE",
    "ZERO",
    "RadScalar",
    "ScalarMode",
    "float_mode",
    "reduce_radical",
    "sqrt_rational",
    "Poly",
    "fischer_inner",
    "normalized_inner",
    "norm_sq",
    "VectorField",
    "lie_bracket",
    "rnorm",
    "conjugate_truncated",
    "pushforward_truncated",
    "JordanType",
    "Sl2Triple",
    "build_triple",
    "decompose",
    "box_solve",
    "iterated_solve",
    "solve_homological",
    "structured_solve",
    "check_condition",
    "first_integrals",
    "first_integrals_of_field",
    "newton_step",
    "normalize_degreewise",
    "normalize_newton",
    "radii_sequence",
]
