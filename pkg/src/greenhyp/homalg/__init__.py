"""Exact-rational graded linear algebra: sparse matrices, complexes, signs."""

from .sparse import SparseMatrix, rank, nullspace, solve, rank_mod_p
from .graded import (
    GradedSpace,
    Cochain,
    GradedMap,
    LadderComplex,
    internal_hom_differential,
    is_cochain_map,
    check_homotopy,
    shift,
    cone,
    cohomology_dims,
    complex_is_acyclic,
    restrict_complex,
)
from . import signs

__all__ = [
    "SparseMatrix", "rank", "nullspace", "solve", "rank_mod_p",
    "GradedSpace", "Cochain", "GradedMap", "LadderComplex",
    "internal_hom_differential", "is_cochain_map", "check_homotopy",
    "shift", "cone", "cohomology_dims", "complex_is_acyclic",
    "restrict_complex", "signs",
]
