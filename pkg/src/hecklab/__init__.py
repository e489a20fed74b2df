"""Multi-parameter Hecke algebras of Coxeter systems: exact arithmetic, Fock space models and experiments."""

__version__ = "0.1.0"

from .coxeter import CapExceeded, CoxeterSystem, builtin_systems
from .graph import SimplicialGraph, SummandIndex
from .hecke import HeckeElement, MultiParameter, ParameterError, parse_element

__all__ = [
    "CapExceeded",
    "CoxeterSystem",
    "HeckeElement",
    "MultiParameter",
    "ParameterError",
    "SimplicialGraph",
    "SummandIndex",
    "builtin_systems",
    "parse_element",
    "__version__",
]
