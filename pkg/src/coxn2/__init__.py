"""Exact search for Coxeter diagrams of finite-volume hyperbolic polytopes whose facet count is dimension + 2."""

from .classify import (
    CapTooSmall,
    DiagramClass,
    classify_diagram,
    enumerate_lanner,
    enumerate_quasi_lanner,
    filter_unique_parabolic,
    is_elliptic,
    is_parabolic,
    parabolic_rank,
)
from .diagram import (
    BOLD,
    CoxeterDiagram,
    DiagramError,
    DiagramSyntaxError,
    Dotted,
    canonical_form,
    connected_components,
    format_diagram,
    is_adjacent,
    parse_diagram,
    subdiagram,
    to_graphviz,
)
from .enumerate import (
    ClassificationResult,
    emit_tables,
    search_products,
    search_pyramids,
    verify_polytope_diagram,
)
from .exact import (
    ParamFamily,
    Signature,
    determinant,
    gram_matrix,
    param_det_polynomial,
    param_root_labels,
    sign,
    signature,
)
from .field import AlgReal
from .gale import (
    GaleDiagram1D,
    coxeter_admissible,
    combinatorial_type,
    gale_from_multiplicities,
    is_face,
    vertices,
)

__version__ = "0.1.0"
