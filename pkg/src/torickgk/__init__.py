"""Toric generalized Kähler structures of symplectic type.

A structure is given by a Delzant polytope, a symplectic potential on its
interior and a constant antisymmetric matrix ``C``.  The package computes the
generalized Kähler scalar curvature and the four dimensional curvature
chain, checks boundary extension criteria and studies the deformation
``Psi(t) = Hess(tau) + t C``.
"""

__version__ = "0.1.0"

from .curvature import curvature_point, extremal_fit, u_gk_at
from .gk_core import GKStructure, frame_at
from .polytope import build_polytope, sample_interior
from .potential import Expression, Guillemin, Quadratic, Sum

__all__ = [
    "GKStructure", "Expression", "Guillemin", "Quadratic", "Sum",
    "build_polytope", "curvature_point", "extremal_fit", "frame_at", "sample_interior", "u_gk_at",
]
