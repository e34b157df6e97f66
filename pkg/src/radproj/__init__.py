"""Radial projections of point sets in F_q^d, with exact checkers for the
bounds on their exceptional sets."""

from .geom import Space, space
from .gf import FieldSpec, field_create
from .radial import PointSet, exceptional_set, incidence_ledger, projection_size

__version__ = "0.1.0"

__all__ = [
    "FieldSpec",
    "PointSet",
    "Space",
    "exceptional_set",
    "field_create",
    "incidence_ledger",
    "projection_size",
    "space",
]
