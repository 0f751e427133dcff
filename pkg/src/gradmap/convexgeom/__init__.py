"""Polyhedral geometry of finitely generated cones and polytopes."""

from .minnorm import min_norm_point
from .polyhedra import (FaceDescriptor, GeneratedCone, GeneratedPolytope,
                        HalfspaceForm, Membership, cone, cone_membership,
                        enumerate_faces, exposed_face, exposing_functional,
                        face_dimension, face_lattice, gordan_certificate,
                        halfspace_form, is_closed_Copen, polytope,
                        polytope_membership, separating_functional)
from .simplex import LPResult, solve_lp, to_fraction

__all__ = [
    "FaceDescriptor", "GeneratedCone", "GeneratedPolytope", "HalfspaceForm",
    "Membership", "LPResult", "cone", "polytope", "cone_membership",
    "polytope_membership", "is_closed_Copen", "separating_functional",
    "gordan_certificate", "enumerate_faces", "exposed_face",
    "exposing_functional", "face_dimension", "face_lattice", "halfspace_form",
    "min_norm_point", "solve_lp", "to_fraction",
]
