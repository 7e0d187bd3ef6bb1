"""Finite-decomposition engines for idempotents."""
from .boolsearch import BACKEND, search_splitting_bool
from .cptp import (Block, BlockDecomposition, DecompositionReport, assemble_decomposition,
                   decompose_cptp_idempotent, fixed_point_space, random_idempotent_instance,
                   verify_decomposition)
from .flor import FlorDecomposition, flor_decompose, random_flor_instance

__all__ = [
    "BACKEND",
    "Block",
    "BlockDecomposition",
    "DecompositionReport",
    "FlorDecomposition",
    "assemble_decomposition",
    "decompose_cptp_idempotent",
    "fixed_point_space",
    "flor_decompose",
    "random_flor_instance",
    "random_idempotent_instance",
    "search_splitting_bool",
    "verify_decomposition",
]
