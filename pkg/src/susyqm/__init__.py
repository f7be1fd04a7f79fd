"""Isospectral partners of the harmonic oscillator and CPRS potentials.

Second-order (confluent) SUSY: a seed level n and a free constant C yield a
regular potential with exactly the spectrum of the base model, together with
closed-form eigenfunctions and ladder operators.
"""

from .errors import (
    ConvergenceFailure,
    GridMismatch,
    InvalidIndex,
    JetDivisionError,
    MissingState,
    NodeOfPsi,
    NonConvergence,
    NonFinitePotential,
    PolynomialZero,
    SingularFamily,
)
from .models import CPRS, HARMONIC, Model, get_model
from .specfun import Jet, Jet2
from .susy import PartnerFamily, superpotential_jet

__all__ = [
    "CPRS",
    "HARMONIC",
    "ConvergenceFailure",
    "GridMismatch",
    "InvalidIndex",
    "Jet",
    "Jet2",
    "JetDivisionError",
    "MissingState",
    "Model",
    "NodeOfPsi",
    "NonConvergence",
    "NonFinitePotential",
    "PartnerFamily",
    "PolynomialZero",
    "SingularFamily",
    "get_model",
    "superpotential_jet",
]
