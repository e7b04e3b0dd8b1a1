"""Coherent configurations and Jordan schemes: construction, closure, search."""

from .cc import (
    ColorGraph,
    SchemeReport,
    StructureFailure,
    StructureTensor,
    classify,
    merge_colors,
    restrict,
    structure_constants,
    symmetrize,
    symmetrized_product,
)

__all__ = [
    "ColorGraph",
    "SchemeReport",
    "StructureFailure",
    "StructureTensor",
    "classify",
    "merge_colors",
    "restrict",
    "structure_constants",
    "symmetrize",
    "symmetrized_product",
]
