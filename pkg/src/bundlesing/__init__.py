"""Singularities of rank-two bundle homomorphisms on open subsets of R^3.

Fold-, cusp- and swallowtail-like points are detected from derivatives of the
determinant along a null section; see :mod:`bundlesing.classify`.
"""

__version__ = "0.1.0"

from .errors import BundleSingError
from .expr import Expression, parse
from .geometry import ExplicitHom, Frame, InducedHom, MapGerm, VectorField
from .classify import (
    DEFAULT_TOL,
    Kind,
    Subtype,
    ToleranceSet,
    classify_any,
    classify_induced_prop4,
    classify_point,
    contact_fold_test,
    foliation_leaf_classify,
    morin_classify,
    plane_map_classify,
)
from .trace import Box, refine_to_S, scan_singular_set, trace_S2

__all__ = [
    "__version__",
    "BundleSingError",
    "Expression",
    "parse",
    "ExplicitHom",
    "Frame",
    "InducedHom",
    "MapGerm",
    "VectorField",
    "DEFAULT_TOL",
    "Kind",
    "Subtype",
    "ToleranceSet",
    "classify_any",
    "classify_induced_prop4",
    "classify_point",
    "contact_fold_test",
    "foliation_leaf_classify",
    "morin_classify",
    "plane_map_classify",
    "Box",
    "refine_to_S",
    "scan_singular_set",
    "trace_S2",
]
