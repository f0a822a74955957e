"""symres: symbolic-numeric residue calculus on flat model manifolds."""

__version__ = "0.1.0"

from .manifold import ModelManifold
from .terms import HomogeneousTerm
from .symbols import ClassicalSymbol, add, compose, multiply, scale, subtract, trace
from .fields import (IdempotentSymbolField, gaussian_bump, make_idempotent_field,
                     random_bandlimited_field, riesz_refine)
from .parametrix import (Contour, ParametrixTable, auxiliary_symbol,
                         build_projection, contour_integrate_projection,
                         lemma_a1_contour, parametrix_recursion,
                         resolvent_reflection)
from .residue import (ResidueReport, SingularGreenSymbolSample, normal_trace,
                      residue_boundary_psdo, residue_commutator, residue_green,
                      residue_interior)

__all__ = [
    "ModelManifold", "HomogeneousTerm", "ClassicalSymbol",
    "add", "subtract", "multiply", "scale", "trace", "compose",
    "IdempotentSymbolField", "gaussian_bump", "make_idempotent_field",
    "random_bandlimited_field", "riesz_refine",
    "Contour", "ParametrixTable", "auxiliary_symbol", "parametrix_recursion",
    "contour_integrate_projection", "build_projection",
    "resolvent_reflection", "lemma_a1_contour",
    "ResidueReport", "SingularGreenSymbolSample", "residue_interior",
    "residue_boundary_psdo", "normal_trace", "residue_green",
    "residue_commutator",
]
