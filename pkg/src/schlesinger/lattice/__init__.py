"""Picard lattice data and exact checks for the Painleve surfaces."""

from __future__ import annotations

from .core import (
    CheckResult,
    LatticeAction,
    LatticeBasis,
    LatticeClass,
    affine_cartan,
    build_action,
    cartan_matrix,
    from_json,
    genus,
    is_isometry,
    pair,
    same_type,
    to_json,
    translation_vector,
    verify_anticanonical_decomposition,
    verify_blowdown_structure,
)
from .surfaces import BLOWDOWNS, SURFACES, A2_PLANE_COMPONENTS, BlowdownChart, Surface, parse_class

__all__ = [
    "is_isometry",
    "A2_PLANE_COMPONENTS", "BLOWDOWNS", "BlowdownChart", "CheckResult", "LatticeAction", "LatticeBasis",
    "LatticeClass", "SURFACES", "Surface", "affine_cartan", "build_action", "cartan_matrix", "from_json",
    "genus", "pair", "parse_class", "same_type", "to_json", "translation_vector",
    "verify_anticanonical_decomposition", "verify_blowdown_structure",
]
