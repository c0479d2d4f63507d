"""Trigonometry of the hermitian Cayley-Klein spaces of complex rank two."""

from .scalars import (
    CDScalar,
    NoRealArgument,
    SpaceLabels,
    all_normalized_labels,
    classify,
    cosk,
    dual_labels,
    normalize,
    sink,
)
from .triangle import (
    DegenerateTriangle,
    TriangleData,
    dual_triangle,
    sample_batch,
    solve,
)
from .laws import full_suite
from .classical import check_classical, to_classical

__version__ = "0.1.0"

__all__ = [
    "CDScalar", "DegenerateTriangle", "NoRealArgument", "SpaceLabels", "TriangleData",
    "all_normalized_labels", "check_classical", "classify", "cosk", "dual_labels", "dual_triangle",
    "full_suite", "normalize", "sample_batch", "sink", "solve", "to_classical",
]
