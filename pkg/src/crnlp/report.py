"""JSON reports.

Rationals are written as ``{"num": p, "den": q, "decimal": d}`` where ``d``
is the float value rounded to 6 places; ``load_report`` turns those objects
back into :class:`~fractions.Fraction`.  Output is deterministic: keys are
sorted and every report carries a ``schema`` tag.
"""

from __future__ import annotations

import json
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np

from .decomposition import BuildingBlockFinding, Decomposition, LPControlReport
from .linalg import Subspace
from .network import Network, StructuralReport
from .replicator import ConditionResult, UniquenessReport
from .robustness import BirchResult, ConservativityDiagnostics, RobustnessReport

SCHEMA = "crnlp.report/1"
_RATIONAL_KEYS = {"num", "den", "decimal"}


def rational(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator, "decimal": round(float(q), 6)}


def jsonable(obj: Any) -> Any:
    """Recursively convert report values to plain JSON types."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, Subspace):
        return subspace(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in items]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def emit_report(report: dict) -> str:
    body = jsonable(report)
    body["schema"] = SCHEMA
    return json.dumps(body, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _restore(obj: Any) -> Any:
    if isinstance(obj, dict):
        if set(obj) == _RATIONAL_KEYS:
            return Fraction(obj["num"], obj["den"])
        return {k: _restore(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_restore(v) for v in obj]
    return obj


def load_report(text: str) -> dict:
    data = json.loads(text)
    if data.get("schema") != SCHEMA:
        raise ValueError(f"unsupported report schema {data.get('schema')!r}")
    return _restore(data)


# ---------------------------------------------------------------- sections

def subspace(s: Subspace) -> dict:
    return {"ambient_dim": s.ambient_dim, "dim": s.dim, "basis": [list(v) for v in s.vectors]}


def structural(net: Network, rep: StructuralReport) -> dict:
    def names(classes):
        return [[net.complex_str(c) for c in cls] for cls in classes]

    return {
        "species": list(net.species),
        "complexes": [net.complex_str(c) for c in range(net.n)],
        "reactions": [net.reaction_str(i) for i in range(net.r)],
        "m": rep.m, "n": rep.n, "n_r": rep.n_r, "r": rep.r,
        "linkage_classes_count": rep.ell, "strong_linkage_classes_count": rep.s_ell,
        "terminal_classes_count": rep.t, "rank": rep.s, "deficiency": rep.deficiency,
        "weakly_reversible": rep.weakly_reversible, "t_minimal": rep.t_minimal,
        "point_terminal": rep.point_terminal, "cycle_terminal": rep.cycle_terminal,
        "conservative": rep.conservative,
        "conservation_witness": None if rep.conservation_witness is None else list(rep.conservation_witness),
        "linkage_classes": names(rep.linkage_classes),
        "strong_linkage_classes": names(rep.strong_linkage_classes),
        "terminal_classes": names(rep.terminal_classes),
    }


def robustness(rep: RobustnessReport, flux: Subspace, flux_source: str) -> dict:
    return {
        "kind": rep.kind,
        "flux_source": flux_source,
        "flux_subspace": subspace(flux),
        "parameter_basis": [list(v) for v in rep.parameter_basis.vectors],
        "parameter_dim": rep.parameter_basis.dim,
        "robust_species": list(rep.robust_names),
        "bound": rep.bound,
    }


def decomposition(d: Decomposition) -> dict:
    return {
        "blocks": [
            {"name": d.names[i], "reactions": [r.label for r in sub.reactions],
             "species": [d.parent.species[k] for k in d.block_species(i)]}
            for i, sub in enumerate(d.subnetworks)
        ],
    }


def finding(d: Decomposition, f: BuildingBlockFinding) -> dict:
    return {
        "block": d.names[f.block],
        "species": d.parent.species[f.species],
        "case": f.case,
        "kind": f.kind,
        "sf_pair": [d.subnetworks[f.block].reactions[j].label for j in f.sf_pair.reactions],
        "evidence": dict(f.evidence),
    }


def lp_control(d: Decomposition, rep: LPControlReport) -> dict:
    return {
        "blocks": [
            {"name": b.name, "species_count": b.species_count, "lp": b.robust_species is not None,
             "robust_species": None if b.robust_species is None else [d.parent.species[k] for k in b.robust_species]}
            for b in rep.blocks
        ],
        "union": [d.parent.species[k] for k in sorted(rep.union)],
        "complete": rep.complete,
    }


def condition(c: ConditionResult) -> dict:
    return {
        "holds": c.holds,
        "vacuous": c.vacuous,
        "failures": [{"term": i + 1, "species": j + 1, "reason": why} for i, j, why in c.failures],
    }


def uniqueness(u: UniquenessReport) -> dict:
    return {
        "m": u.m,
        "weakly_reversible": u.weakly_reversible,
        "n_minus_ell": u.n_minus_ell,
        "summands": [
            {"term": f.term + 1, "player": f.player + 1, "pl_rdk": f.pl_rdk, "pl_tik": f.pl_tik,
             "kinetic_deficiency": f.kinetic_deficiency,
             "kinetic_flux_subspace_dim": f.kinetic_flux_subspace.dim}
            for f in u.summands
        ],
        "flux_subspace": subspace(u.flux_subspace),
        "parameter_dim": u.parameter_subspace.dim,
        "robust_species": [u.species[k] for k in u.robust_species],
        "unique_equilibrium": u.unique_equilibrium,
    }


def birch(b: BirchResult) -> dict:
    return {
        "point": [float(v) for v in b.point],
        "iterations": b.iterations,
        "lp_residual": b.lp_residual,
        "flux_class_residual": b.flux_class_residual,
    }


def conservativity(c: ConservativityDiagnostics, species: tuple[str, ...]) -> dict:
    return {
        "conservative": c.conservative,
        "witness": None if c.witness is None else list(c.witness),
        "robust_species": [species[k] for k in c.robust_species],
        "consistent": c.consistent,
        "messages": list(c.messages),
    }
