"""Exact homological algebra for bound quiver algebras and their reductions."""

from .exactfield import QQ, PrimeField, parse_field
from .presentation import Presentation, load_presentation, parse_presentation
from .algebra import BasedAlgebra, algebra_basis
from .modules import Module, Morphism, projective, simple, injective
from .homology import DimVerdict, ext_dim, pd_bounded, id_bounded, perp_test
from .gproj import gproj_test, complete_resolution
from .reduction import reduce, ReductionTrace, gorenstein_test

__all__ = [
    "QQ", "PrimeField", "parse_field", "Presentation", "load_presentation",
    "parse_presentation", "BasedAlgebra", "algebra_basis", "Module", "Morphism", "projective",
    "simple", "injective", "DimVerdict", "ext_dim", "pd_bounded", "id_bounded", "perp_test",
    "gproj_test", "complete_resolution", "reduce", "ReductionTrace", "gorenstein_test",
]
__version__ = "0.1.0"
