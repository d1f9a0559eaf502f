"""Exact structural analysis and concentration robustness of power-law reaction networks."""

from .decomposition import (
    Decomposition,
    build_decomposition,
    building_blocks_acr,
    building_blocks_bcr,
    is_incidence_independent,
    is_independent,
    linkage_class_decomposition,
)
from .fileformat import NetworkFile, ParseError, load, parse
from .kinetics import PLKind, PolyPLKinetics, PowerLawKinetics, classify_plk, is_pl_tik
from .linalg import Matrix, Subspace, orthogonal_complement, rank, rref
from .network import Network, structural_report
from .replicator import PayoffSystem, check_condition, uniqueness_report
from .report import emit_report, load_report
from .robustness import LPSet, RobustnessKind, birch_point, robust_species

__version__ = "0.1.0"

__all__ = [
    "Decomposition", "LPSet", "Matrix", "Network", "NetworkFile", "PLKind", "ParseError",
    "PayoffSystem", "PolyPLKinetics", "PowerLawKinetics", "RobustnessKind", "Subspace",
    "birch_point", "build_decomposition", "building_blocks_acr", "building_blocks_bcr",
    "check_condition", "classify_plk", "emit_report", "is_incidence_independent",
    "is_independent", "is_pl_tik", "linkage_class_decomposition", "load", "load_report",
    "orthogonal_complement", "parse", "rank", "robust_species", "rref", "structural_report",
    "uniqueness_report",
]
