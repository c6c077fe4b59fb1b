"""
plgroup package.

Exact arithmetic for groups of piecewise-linear homeomorphisms of the line
commuting with integer translation: the groups Omega_n and Gamma_n, the
Higman-Thompson groups F_{2^n} inside them, their cocycles, constructive
normal forms and width certificates.
"""

__version__ = "0.1.0"

from src.plgroup.core.dyadic import Dyadic, Residue, parse_dyadic, theta
from src.plgroup.core.errors import (
    ConstructionError,
    MalformedInputError,
    PLGroupError,
    RefusalError,
)
from src.plgroup.core.omega import check_omega, make_tau, make_translation, make_zeta
from src.plgroup.core.plmap import (
    PLMap1P,
    compose,
    evaluate,
    identity,
    invert,
    parse_plmap,
    serialize,
)

__all__ = [
    "ConstructionError",
    "Dyadic",
    "MalformedInputError",
    "PLGroupError",
    "PLMap1P",
    "RefusalError",
    "Residue",
    "check_omega",
    "compose",
    "evaluate",
    "identity",
    "invert",
    "make_tau",
    "make_translation",
    "make_zeta",
    "parse_dyadic",
    "parse_plmap",
    "serialize",
    "theta",
]
