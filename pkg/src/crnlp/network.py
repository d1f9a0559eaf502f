"""Reaction networks as species-labelled digraphs of complexes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .linalg import (
    Matrix,
    Subspace,
    Vector,
    as_fraction,
    image_basis,
    orthogonal_complement,
    positive_vector_in_subspace,
    rank,
)


class NetworkError(ValueError):
    """Raised when a reaction network violates a structural invariant."""


@dataclass(frozen=True)
class Reaction:
    label: str
    source: int
    target: int


@dataclass(frozen=True)
class Network:
    """A CRN (S, C, R).

    ``complexes`` are coefficient vectors over ``species``; reactions refer
    to complexes by index.  Build instances with :meth:`from_reactions`,
    which merges numerically equal complexes and validates the digraph.
    """

    species: tuple[str, ...]
    complexes: tuple[Vector, ...]
    reactions: tuple[Reaction, ...]

    def __post_init__(self):
        m = len(self.species)
        if len(set(self.species)) != m:
            raise NetworkError("duplicate species names")
        if any(len(c) != m for c in self.complexes):
            raise NetworkError("complex length does not match species count")
        if len(set(self.complexes)) != len(self.complexes):
            raise NetworkError("complexes are not pairwise distinct")
        if any(v < 0 for c in self.complexes for v in c):
            raise NetworkError("negative stoichiometric coefficient")
        labels = [r.label for r in self.reactions]
        if len(set(labels)) != len(labels):
            raise NetworkError("duplicate reaction labels")
        arcs = set()
        degree = [0] * len(self.complexes)
        for r in self.reactions:
            if r.source == r.target:
                raise NetworkError(f"reaction {r.label} is a self-loop")
            if (r.source, r.target) in arcs:
                raise NetworkError(f"reaction {r.label} duplicates an existing arc")
            arcs.add((r.source, r.target))
            degree[r.source] += 1
            degree[r.target] += 1
        if any(d == 0 for d in degree):
            raise NetworkError("isolated complex (every complex needs positive degree)")

    @classmethod
    def from_reactions(
        cls,
        species: Sequence[str],
        reactions: Iterable[tuple[str, Mapping[str, object], Mapping[str, object]]],
    ) -> "Network":
        """Build from ``(label, reactant, product)`` triples of species->coefficient maps."""
        species = tuple(species)
        index = {name: i for i, name in enumerate(species)}
        complexes: list[Vector] = []
        lookup: dict[Vector, int] = {}

        def intern(coeffs: Mapping[str, object]) -> int:
            vec = [Fraction(0)] * len(species)
            for name, value in coeffs.items():
                if name not in index:
                    raise NetworkError(f"unknown species {name!r}")
                vec[index[name]] += as_fraction(value)
            key = tuple(vec)
            if key not in lookup:
                lookup[key] = len(complexes)
                complexes.append(key)
            return lookup[key]

        rxns = [Reaction(label, intern(lhs), intern(rhs)) for label, lhs, rhs in reactions]
        return cls(species, tuple(complexes), tuple(rxns))

    # sizes
    @property
    def m(self) -> int:
        return len(self.species)

    @property
    def n(self) -> int:
        return len(self.complexes)

    @property
    def r(self) -> int:
        return len(self.reactions)

    @cached_property
    def reactant_complexes(self) -> tuple[int, ...]:
        """Indices of complexes that are the source of some reaction, ascending."""
        return tuple(sorted({r.source for r in self.reactions}))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(r.label for r in self.reactions)

    def reaction_index(self, label: str) -> int:
        for i, r in enumerate(self.reactions):
            if r.label == label:
                return i
        raise KeyError(label)

    def species_index(self, name: str) -> int:
        try:
            return self.species.index(name)
        except ValueError:
            raise KeyError(name) from None

    def complex_str(self, c: int) -> str:
        terms = []
        for name, v in zip(self.species, self.complexes[c]):
            if v == 0:
                continue
            terms.append(name if v == 1 else f"{v} {name}")
        return " + ".join(terms) or "0"

    def reaction_str(self, i: int) -> str:
        r = self.reactions[i]
        return f"{r.label}: {self.complex_str(r.source)} -> {self.complex_str(r.target)}"

    def species_in_use(self) -> tuple[int, ...]:
        """Species with a nonzero coefficient in some complex."""
        return tuple(k for k in range(self.m) if any(c[k] != 0 for c in self.complexes))

    @cached_property
    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from((r.source, r.target) for r in self.reactions)
        return g

    def __repr__(self) -> str:
        return f"Network(m={self.m}, n={self.n}, r={self.r})"


def stoichiometric_matrix(net: Network) -> Matrix:
    """m x r matrix; column j is product minus reactant of reaction j."""
    cols = [
        tuple(p - s for p, s in zip(net.complexes[r.target], net.complexes[r.source]))
        for r in net.reactions
    ]
    return Matrix.from_columns(cols, net.m)


def incidence_matrix(net: Network) -> Matrix:
    cols = []
    for r in net.reactions:
        col = [Fraction(0)] * net.n
        col[r.source] = Fraction(-1)
        col[r.target] = Fraction(1)
        cols.append(col)
    return Matrix.from_columns(cols, net.n)


def stoichiometric_subspace(net: Network) -> Subspace:
    return image_basis(stoichiometric_matrix(net))


def _sorted_classes(components: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted((tuple(sorted(c)) for c in components), key=lambda c: c[0]))


def linkage_classes(net: Network) -> tuple[tuple[int, ...], ...]:
    return _sorted_classes(nx.weakly_connected_components(net.graph))


def strong_linkage_classes(net: Network) -> tuple[tuple[int, ...], ...]:
    return _sorted_classes(nx.strongly_connected_components(net.graph))


def terminal_strong_linkage_classes(net: Network) -> tuple[tuple[int, ...], ...]:
    """Strong linkage classes with no reaction leaving them."""
    out = []
    for cls in strong_linkage_classes(net):
        members = set(cls)
        if all(t in members for s in cls for t in net.graph.successors(s)):
            out.append(cls)
    return tuple(out)


def terminal_complexes(net: Network) -> frozenset[int]:
    return frozenset(c for cls in terminal_strong_linkage_classes(net) for c in cls)


def reaction_linkage_class(net: Network) -> tuple[int, ...]:
    """Index (into :func:`linkage_classes`) of the class containing each reaction."""
    where = {c: k for k, cls in enumerate(linkage_classes(net)) for c in cls}
    return tuple(where[r.source] for r in net.reactions)


def deficiency(net: Network) -> int:
    return net.n - len(linkage_classes(net)) - rank(stoichiometric_matrix(net))


def conservation_witness(net: Network) -> Vector | None:
    """Positive vector of S^perp (every entry >= 1) if the network is conservative."""
    return positive_vector_in_subspace(orthogonal_complement(stoichiometric_subspace(net)))


@dataclass(frozen=True)
class StructuralReport:
    m: int
    n: int
    n_r: int
    r: int
    ell: int
    s_ell: int
    t: int
    s: int
    deficiency: int
    weakly_reversible: bool
    t_minimal: bool
    point_terminal: bool
    cycle_terminal: bool
    conservative: bool
    conservation_witness: Vector | None
    linkage_classes: tuple[tuple[int, ...], ...]
    strong_linkage_classes: tuple[tuple[int, ...], ...]
    terminal_classes: tuple[tuple[int, ...], ...]


def structural_report(net: Network) -> StructuralReport:
    lcs = linkage_classes(net)
    slcs = strong_linkage_classes(net)
    tcs = terminal_strong_linkage_classes(net)
    s = rank(stoichiometric_matrix(net))
    n_r = len(net.reactant_complexes)
    ell, s_ell, t = len(lcs), len(slcs), len(tcs)
    witness = conservation_witness(net)
    report = StructuralReport(
        m=net.m, n=net.n, n_r=n_r, r=net.r, ell=ell, s_ell=s_ell, t=t, s=s,
        deficiency=net.n - ell - s,
        weakly_reversible=s_ell == ell,
        t_minimal=t == ell,
        point_terminal=t == net.n - n_r,
        cycle_terminal=net.n == n_r,
        conservative=witness is not None,
        conservation_witness=witness,
        linkage_classes=lcs,
        strong_linkage_classes=slcs,
        terminal_classes=tcs,
    )
    assert report.deficiency >= 0 and t >= ell
    return report


def subnetwork(net: Network, reaction_indices: Iterable[int], *, restrict_species: bool = True) -> Network:
    """Network spanned by the chosen reactions.

    With ``restrict_species=False`` the parent's species list is kept, so
    vectors of the subnetwork live in the parent's species space.
    """
    chosen = sorted(set(reaction_indices))
    if not chosen:
        raise NetworkError("empty reaction selection")
    if chosen[0] < 0 or chosen[-1] >= net.r:
        raise NetworkError("reaction index out of range")
    rxns = [net.reactions[i] for i in chosen]
    used = sorted({c for r in rxns for c in (r.source, r.target)})
    if restrict_species:
        keep = [k for k in range(net.m) if any(net.complexes[c][k] != 0 for c in used)]
    else:
        keep = list(range(net.m))
    species = tuple(net.species[k] for k in keep)
    cmap = {c: i for i, c in enumerate(used)}
    complexes = tuple(tuple(net.complexes[c][k] for k in keep) for c in used)
    return Network(species, complexes, tuple(Reaction(r.label, cmap[r.source], cmap[r.target]) for r in rxns))
