"""Explicit Eisenstein-type coefficient bounds for algebraic power series over Q."""

__version__ = "0.1.0"

from .arith import INFINITE, LogReal, Place
from .discbounds import DiscriminantReport, LambdaChain, discriminant_bound, lambda_chain
from .eisenstein import (
    EisensteinCertificate,
    exceptional_set_bound,
    global_divisor,
    theorem_height_bound,
    verify_bounds,
)
from .errors import (
    DomainError,
    EisenkitError,
    FieldError,
    ParseError,
    PreconditionError,
    TheoremViolation,
)
from .numberfield import AlgNum, NumberField
from .parse import parse_bipoly, parse_unipoly
from .poly import BiPoly, UniPoly
from .puiseux import BranchSet, PuiseuxSeries, expand_regular, puiseux_branches

__all__ = [
    "AlgNum", "BiPoly", "BranchSet", "DiscriminantReport", "DomainError", "EisenkitError",
    "EisensteinCertificate", "FieldError", "INFINITE", "LambdaChain", "LogReal", "NumberField",
    "ParseError", "Place", "PreconditionError", "PuiseuxSeries", "TheoremViolation", "UniPoly",
    "discriminant_bound", "exceptional_set_bound", "expand_regular", "global_divisor",
    "lambda_chain", "parse_bipoly", "parse_unipoly", "puiseux_branches", "theorem_height_bound",
    "verify_bounds",
]
