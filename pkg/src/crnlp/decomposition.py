"""Decompositions into subnetworks, robustness propagation and building blocks.

Blocks are analysed inside the parent's species space, so their
stoichiometric and kinetic order subspaces can be summed and compared
directly with the parent's.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .kinetics import (
    PLKind,
    PowerLawKinetics,
    SFPair,
    classify_plk,
    evaluate_complex_formation,
    evaluate_sfrf,
    is_pl_tik,
    kinetic_deficiency,
    kinetic_flux_subspace,
    kinetic_order_subspace,
    sf_pairs,
)
from .linalg import Subspace, is_direct_sum
from .network import (
    Network,
    deficiency,
    linkage_classes,
    stoichiometric_subspace,
    structural_report,
    subnetwork,
)
from .robustness import LPKind, LPSet, RobustnessKind, robust_species

WITNESS_TOL = 1e-9


class DecompositionError(ValueError):
    """Invalid partition, or a decomposition lacking the independence a result needs."""


@dataclass(frozen=True)
class Decomposition:
    parent: Network
    blocks: tuple[tuple[int, ...], ...]
    names: tuple[str, ...]
    subnetworks: tuple[Network, ...] = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.blocks)

    def block_species(self, i: int) -> tuple[int, ...]:
        """Parent species indices occurring in block i."""
        return self.subnetworks[i].species_in_use()


def build_decomposition(net: Network, blocks: Sequence[Iterable], names: Sequence[str] | None = None) -> Decomposition:
    """Validate a partition of the reactions (indices or labels) into nonempty blocks."""
    resolved = []
    for b in blocks:
        idx = tuple(sorted(net.reaction_index(x) if isinstance(x, str) else int(x) for x in b))
        if not idx:
            raise DecompositionError("empty block")
        if len(set(idx)) != len(idx):
            raise DecompositionError("block lists a reaction twice")
        resolved.append(idx)
    seen = [i for b in resolved for i in b]
    if len(seen) != len(set(seen)):
        raise DecompositionError("blocks overlap")
    if set(seen) != set(range(net.r)):
        missing = sorted(set(range(net.r)) - set(seen))
        raise DecompositionError(f"blocks miss reactions {[net.reactions[i].label for i in missing]}")
    names = tuple(names) if names is not None else tuple(f"N{i + 1}" for i in range(len(resolved)))
    if len(names) != len(resolved):
        raise DecompositionError("one name per block required")
    subs = tuple(subnetwork(net, b, restrict_species=False) for b in resolved)
    return Decomposition(net, tuple(resolved), names, subs)


def linkage_class_decomposition(net: Network) -> Decomposition:
    lcs = [set(c) for c in linkage_classes(net)]
    blocks = [[i for i, r in enumerate(net.reactions) if r.source in lc] for lc in lcs]
    return build_decomposition(net, blocks)


def block_kinetics(d: Decomposition, k: PowerLawKinetics, i: int) -> PowerLawKinetics:
    return k.restrict(d.blocks[i])


def is_independent(d: Decomposition) -> bool:
    """Stoichiometric subspaces of the blocks form a direct sum."""
    return is_direct_sum([stoichiometric_subspace(s) for s in d.subnetworks])


def is_incidence_independent(d: Decomposition) -> bool:
    """sum(n_i - l_i) == n - l."""
    parent = d.parent.n - len(linkage_classes(d.parent))
    return parent == sum(s.n - len(linkage_classes(s)) for s in d.subnetworks)


def incidence_images(d: Decomposition) -> list[Subspace]:
    """Im I_{a,i} embedded in the parent's complex space."""
    out = []
    for block in d.blocks:
        cols = []
        for i in block:
            r = d.parent.reactions[i]
            col = [0] * d.parent.n
            col[r.source], col[r.target] = -1, 1
            cols.append(col)
        out.append(Subspace.span(cols, d.parent.n))
    return out


def is_kinetic_independent(d: Decomposition, k: PowerLawKinetics) -> bool:
    """Kinetic flux subspaces of the (PL-RDK) blocks form a direct sum.

    Stands in for the kinetic-complex half of bi-level independence.
    """
    return is_direct_sum(block_kinetic_flux_subspaces(d, k))


def block_kinetic_flux_subspaces(d: Decomposition, k: PowerLawKinetics) -> list[Subspace]:
    return [kinetic_flux_subspace(s, block_kinetics(d, k, i)) for i, s in enumerate(d.subnetworks)]


def decomposition_flux_subspace(d: Decomposition, k: PowerLawKinetics) -> Subspace:
    """Sum of the blocks' kinetic flux subspaces."""
    parts = block_kinetic_flux_subspaces(d, k)
    return Subspace.span((v for p in parts for v in p.vectors), d.parent.m)


def _require(d: Decomposition, kind: RobustnessKind) -> None:
    if kind is RobustnessKind.ACR and not is_independent(d):
        raise DecompositionError("decomposition is not independent")
    if kind is RobustnessKind.BCR and not is_incidence_independent(d):
        raise DecompositionError("decomposition is not incidence independent")


def propagate_robustness(d: Decomposition, per_block: Sequence[Iterable], kind: RobustnessKind | str) -> frozenset[int]:
    """Union of the blocks' robust species: a lower bound for the whole network."""
    kind = RobustnessKind(kind)
    _require(d, kind)
    if len(per_block) != d.k:
        raise DecompositionError("one robust set per block required")
    out: set[int] = set()
    for i, robust in enumerate(per_block):
        robust = {d.parent.species_index(x) if isinstance(x, str) else int(x) for x in robust}
        outside = robust - set(d.block_species(i))
        if outside:
            names = sorted(d.parent.species[x] for x in outside)
            raise DecompositionError(f"block {d.names[i]} claims robustness in {names}, which do not occur in it")
        out |= robust
    return frozenset(out)


# ---------------------------------------------------------------- building blocks

class BlockCase(str, Enum):
    DEF0_WR_LINKAGE = "DEF0_WR_LINKAGE"
    DEF1_NONTERMINAL = "DEF1_NONTERMINAL"
    CYCLE_TERMINAL_LP = "CYCLE_TERMINAL_LP"


@dataclass(frozen=True)
class BuildingBlockFinding:
    block: int
    species: int
    case: BlockCase
    kind: RobustnessKind
    sf_pair: SFPair
    evidence: Mapping[str, object]


def lp_certificate(sub: Network, k: PowerLawKinetics, kind: RobustnessKind | str = RobustnessKind.ACR,
                   asserted: bool = False) -> str | None:
    """How a cycle terminal PL-RDK block is known to be PLP (ACR) or CLP (BCR) with flux S~.

    Ranked: zero kinetic deficiency with weak reversibility (for PLP also
    deficiency zero, so every positive equilibrium is complex balanced);
    PL-TIK on a t-minimal network with independent linkage classes of
    deficiency <= 1; an explicit user assertion. The PL-TIK route also
    requires dim S~ == s, since a PLP set meeting every stoichiometric class
    exactly once has dimension m - s.
    """
    kind = RobustnessKind(kind)
    rep = structural_report(sub)
    if rep.weakly_reversible and kinetic_deficiency(sub, k) == 0:
        if kind is RobustnessKind.BCR:
            return "zero kinetic deficiency, weakly reversible"
        if rep.deficiency == 0:
            return "zero kinetic deficiency and deficiency, weakly reversible"
    if is_pl_tik(sub, k) and rep.t_minimal and kinetic_order_subspace(sub, k).dim == rep.s:
        lc_defs = []
        for cls in rep.linkage_classes:
            members = set(cls)
            lc = [j for j, r in enumerate(sub.reactions) if r.source in members]
            lc_defs.append(deficiency(subnetwork(sub, lc, restrict_species=False)))
        if sum(lc_defs) == rep.deficiency and all(v <= 1 for v in lc_defs):
            return "PL-TIK, t-minimal, independent linkage classes of deficiency <= 1, dim S~ = s"
    if asserted:
        return "user assertion"
    return None


def _check_witness(net: Network, k: PowerLawKinetics, witness, kind: RobustnessKind) -> None:
    if witness is None:
        return
    if k.rates is None:
        raise DecompositionError("an equilibrium witness needs rate constants")
    residual = evaluate_sfrf(net, k, witness) if kind is RobustnessKind.ACR else evaluate_complex_formation(net, k, witness)
    worst = float(max(abs(residual), default=0.0))
    if worst > WITNESS_TOL:
        what = "positive" if kind is RobustnessKind.ACR else "complex balanced"
        raise DecompositionError(f"witness is not a {what} equilibrium (residual {worst:.3e})")


def _building_blocks(net, k, d, kind, asserted_lp, witness) -> list[BuildingBlockFinding]:
    _require(d, kind)
    _check_witness(net, k, witness, kind)
    asserted_lp = set(asserted_lp or ())
    findings: list[BuildingBlockFinding] = []
    for i, sub in enumerate(d.subnetworks):
        kb = block_kinetics(d, k, i)
        if classify_plk(sub, kb) is not PLKind.RDK:
            continue
        pairs = sf_pairs(sub, kb)
        if not pairs:
            continue
        rep = structural_report(sub)
        cert = lp_certificate(sub, kb, kind, i in asserted_lp) if rep.cycle_terminal else None
        for pair in pairs:
            base = {"deficiency": rep.deficiency, "weakly_reversible": rep.weakly_reversible,
                    "cycle_terminal": rep.cycle_terminal, "pl_rdk": True}
            if rep.deficiency == 0 and rep.weakly_reversible and pair.same_linkage_class:
                findings.append(BuildingBlockFinding(i, pair.species, BlockCase.DEF0_WR_LINKAGE, kind, pair, base))
            if rep.deficiency == 1 and pair.reactants_nonterminal:
                findings.append(BuildingBlockFinding(i, pair.species, BlockCase.DEF1_NONTERMINAL, kind, pair, base))
            if rep.cycle_terminal and pair.same_linkage_class and cert is not None:
                flux = kinetic_order_subspace(sub, kb)
                check = robust_species(LPSet(flux, kind=LPKind.PLP if kind is RobustnessKind.ACR else LPKind.CLP))
                assert pair.species in check.robust_species
                findings.append(BuildingBlockFinding(i, pair.species, BlockCase.CYCLE_TERMINAL_LP, kind, pair,
                                                     {**base, "lp_certificate": cert,
                                                      "flux_subspace_dim": flux.dim}))
    for f in findings:
        # deficiency-zero findings never rest on an SF-pair that spans linkage classes
        assert f.case is not BlockCase.DEF0_WR_LINKAGE or f.sf_pair.same_linkage_class
    order = list(BlockCase)
    findings.sort(key=lambda f: (f.block, order.index(f.case), f.sf_pair.reactions))
    unique: dict[int, BuildingBlockFinding] = {}
    for f in findings:
        unique.setdefault(f.species, f)
    return sorted(unique.values(), key=lambda f: (f.block, f.species))


def building_blocks_acr(
    net: Network,
    k: PowerLawKinetics,
    d: Decomposition,
    has_positive_equilibrium: bool,
    *,
    asserted_lp: Iterable[int] = (),
    witness=None,
) -> list[BuildingBlockFinding]:
    """Species with ACR in the whole network certified by a single block.

    Requires an independent decomposition and (caller-asserted) existence
    of a positive equilibrium; ``witness`` is checked numerically when given.
    One finding per species.
    """
    if not has_positive_equilibrium:
        raise DecompositionError("building-block conclusions need a positive equilibrium")
    return _building_blocks(net, k, d, RobustnessKind.ACR, asserted_lp, witness)


def building_blocks_bcr(
    net: Network,
    k: PowerLawKinetics,
    d: Decomposition,
    has_complex_balanced_equilibrium: bool,
    *,
    asserted_lp: Iterable[int] = (),
    witness=None,
) -> list[BuildingBlockFinding]:
    """BCR analogue of :func:`building_blocks_acr` over an incidence independent decomposition."""
    if not has_complex_balanced_equilibrium:
        raise DecompositionError("building-block conclusions need a complex balanced equilibrium")
    return _building_blocks(net, k, d, RobustnessKind.BCR, asserted_lp, witness)


# ---------------------------------------------------------------- LP control

@dataclass(frozen=True)
class BlockControl:
    block: int
    name: str
    species_count: int
    robust_species: tuple[int, ...] | None  # None: block has no LP status


@dataclass(frozen=True)
class LPControlReport:
    blocks: tuple[BlockControl, ...]
    union: frozenset[int]
    complete: bool

    @property
    def uncontrolled(self) -> tuple[int, ...]:
        return tuple(b.block for b in self.blocks if b.robust_species is None)


def lp_control_report(d: Decomposition, lp_blocks: Mapping[int, LPSet], kind: RobustnessKind | str = RobustnessKind.ACR) -> LPControlReport:
    """Robust species per LP block and their union, a lower bound for the network.

    The union is only a valid lower bound when the decomposition carries the
    independence that ``kind`` requires; callers check that separately.
    """
    kind = RobustnessKind(kind)
    rows = []
    union: set[int] = set()
    for i in range(d.k):
        species_count = len(d.block_species(i))
        if i not in lp_blocks:
            rows.append(BlockControl(i, d.names[i], species_count, None))
            continue
        robust = robust_species(lp_blocks[i], kind).robust_species
        assert len(robust) <= lp_blocks[i].flux.dim
        rows.append(BlockControl(i, d.names[i], species_count, robust))
        union |= set(robust)
    return LPControlReport(tuple(rows), frozenset(union), all(i in lp_blocks for i in range(d.k)))


def certified_block_lp_sets(d: Decomposition, k: PowerLawKinetics, kind: RobustnessKind | str = RobustnessKind.ACR,
                            asserted: Iterable[int] = ()) -> dict[int, LPSet]:
    """LP sets (flux subspace S~_i) for the blocks whose LP status can be certified."""
    kind = RobustnessKind(kind)
    lp_kind = LPKind.PLP if kind is RobustnessKind.ACR else LPKind.CLP
    asserted = set(asserted)
    out = {}
    for i, sub in enumerate(d.subnetworks):
        kb = block_kinetics(d, k, i)
        if classify_plk(sub, kb) is not PLKind.RDK or len(sub.reactant_complexes) != sub.n:
            if i in asserted and classify_plk(sub, kb) is PLKind.RDK:
                out[i] = LPSet(kinetic_flux_subspace(sub, kb), kind=lp_kind, species=d.parent.species)
            continue
        if lp_certificate(sub, kb, kind, i in asserted) is not None:
            out[i] = LPSet(kinetic_order_subspace(sub, kb), kind=lp_kind, species=d.parent.species)
    return out

