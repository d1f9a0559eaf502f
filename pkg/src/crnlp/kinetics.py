"""Power-law and poly-power-law kinetics on a reaction network."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .linalg import Matrix, Subspace, Vector, as_fraction, as_vector, rank
from .network import (
    Network,
    incidence_matrix,
    linkage_classes,
    reaction_linkage_class,
    stoichiometric_matrix,
    terminal_complexes,
)


class KineticsError(ValueError):
    """Kinetics incompatible with the network or with the requested operation."""


class PLKind(str, Enum):
    RDK = "PL-RDK"
    NDK = "PL-NDK"


def _check_rates(rates: Sequence | None, r: int) -> tuple[Fraction, ...] | None:
    if rates is None:
        return None
    rates = as_vector(rates)
    if len(rates) != r:
        raise KineticsError(f"expected {r} rate constants, got {len(rates)}")
    if any(k <= 0 for k in rates):
        raise KineticsError("rate constants must be strictly positive")
    return rates


@dataclass(frozen=True)
class PowerLawKinetics:
    """K_i(x) = k_i prod_j x_j^F[i, j]; ``orders`` is the r x m kinetic order matrix."""

    orders: Matrix
    rates: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "rates", _check_rates(self.rates, self.orders.rows))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], rates: Sequence | None = None, m: int | None = None):
        return cls(Matrix.from_rows(rows, cols=m), rates)

    @classmethod
    def mass_action(cls, net: Network, rates: Sequence | None = None) -> "PowerLawKinetics":
        return cls(Matrix.from_rows([net.complexes[r.source] for r in net.reactions], cols=net.m), rates)

    @property
    def r(self) -> int:
        return self.orders.rows

    def restrict(self, reaction_indices: Sequence[int]) -> "PowerLawKinetics":
        rates = None if self.rates is None else tuple(self.rates[i] for i in reaction_indices)
        return PowerLawKinetics(self.orders.select_rows(reaction_indices), rates)

    def rate_values(self, x: Sequence) -> list:
        _require_rates(self.rates)
        return [k * _monomial(x, row) for k, row in zip(self.rates, self.orders.entries)]


@dataclass(frozen=True)
class PolyPLKinetics:
    """K_i(x) = k_i sum_j a_ij x^f_ij.

    ``terms[i]`` is a tuple of ``(a_ij, exponent_row)`` pairs, kept in
    lexicographic order of the exponent rows.
    """

    m: int
    terms: tuple[tuple[tuple[Fraction, Vector], ...], ...]
    rates: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        normalised = []
        for i, reaction_terms in enumerate(self.terms):
            if not reaction_terms:
                raise KineticsError(f"reaction {i} has no kinetic terms")
            ts = []
            for a, row in reaction_terms:
                a, row = as_fraction(a), as_vector(row)
                if a < 0:
                    raise KineticsError(f"negative coefficient {a} in reaction {i}")
                if a == 0:
                    raise KineticsError(f"zero coefficient in reaction {i}")
                if len(row) != self.m:
                    raise KineticsError(f"exponent row of length {len(row)} in reaction {i}, expected {self.m}")
                ts.append((a, row))
            normalised.append(tuple(sorted(ts, key=lambda t: t[1])))
        object.__setattr__(self, "terms", tuple(normalised))
        object.__setattr__(self, "rates", _check_rates(self.rates, len(self.terms)))

    @classmethod
    def from_power_law(cls, k: PowerLawKinetics) -> "PolyPLKinetics":
        return cls(k.orders.cols, tuple(((Fraction(1), row),) for row in k.orders.entries), k.rates)

    @property
    def r(self) -> int:
        return len(self.terms)

    @property
    def term_counts(self) -> tuple[int, ...]:
        return tuple(len(t) for t in self.terms)

    @property
    def is_canonical(self) -> bool:
        return len(set(self.term_counts)) == 1

    def restrict(self, reaction_indices: Sequence[int]) -> "PolyPLKinetics":
        rates = None if self.rates is None else tuple(self.rates[i] for i in reaction_indices)
        return PolyPLKinetics(self.m, tuple(self.terms[i] for i in reaction_indices), rates)

    def rate_values(self, x: Sequence) -> list:
        _require_rates(self.rates)
        return [k * sum(a * _monomial(x, row) for a, row in ts) for k, ts in zip(self.rates, self.terms)]


AnyKinetics = Union[PowerLawKinetics, PolyPLKinetics]


def _require_rates(rates) -> None:
    if rates is None:
        raise KineticsError("rate constants are required for evaluation")


def _monomial(x: Sequence, row: Sequence[Fraction]):
    out = 1
    for xi, f in zip(x, row):
        if f == 0:
            continue
        if isinstance(xi, Fraction) and f.denominator == 1:
            out *= xi ** int(f)
        else:
            out *= float(xi) ** float(f)
    return out


def _check_shape(net: Network, k: AnyKinetics) -> None:
    m = k.orders.cols if isinstance(k, PowerLawKinetics) else k.m
    if k.r != net.r or m != net.m:
        raise KineticsError(f"kinetics shape ({k.r} reactions, {m} species) does not match network "
                            f"({net.r} reactions, {net.m} species)")


# ---------------------------------------------------------------- classification

def classify_plk(net: Network, k: PowerLawKinetics) -> PLKind:
    """PL-RDK iff reactions with a common reactant complex share their kinetic order row."""
    _check_shape(net, k)
    seen: dict[int, Vector] = {}
    for r, row in zip(net.reactions, k.orders.entries):
        if seen.setdefault(r.source, row) != row:
            return PLKind.NDK
    return PLKind.RDK


def kinetic_complexes(net: Network, k: PowerLawKinetics) -> dict[int, Vector]:
    """Kinetic complex (kinetic order row) of each reactant complex."""
    if classify_plk(net, k) is not PLKind.RDK:
        raise KineticsError("kinetic complexes are only defined for PL-RDK kinetics")
    return {r.source: row for r, row in zip(net.reactions, k.orders.entries)}


@dataclass(frozen=True)
class TMatrix:
    """Columns are the kinetic complexes of the reactant complexes.

    ``augmented`` appends one characteristic row per linkage class.
    """

    reactant_complexes: tuple[int, ...]
    matrix: Matrix
    augmented: Matrix


def t_matrix(net: Network, k: PowerLawKinetics) -> TMatrix:
    kc = kinetic_complexes(net, k)
    reactants = net.reactant_complexes
    t = Matrix.from_columns([kc[c] for c in reactants], net.m)
    char_rows = [[Fraction(int(c in cls)) for c in reactants] for cls in linkage_classes(net)]
    aug = t.vstack(Matrix.from_rows(char_rows, cols=len(reactants)))
    return TMatrix(reactants, t, aug)


def is_pl_tik(net: Network, k: PowerLawKinetics) -> bool:
    """Augmented T-matrix has maximal column rank."""
    tm = t_matrix(net, k)
    return rank(tm.augmented) == tm.augmented.cols


def _differences(kc: dict[int, Vector], arcs: Iterable[tuple[int, int]], m: int) -> Subspace:
    return Subspace.span((tuple(b - a for a, b in zip(kc[s], kc[t])) for s, t in arcs), m)


def kinetic_order_subspace(net: Network, k: PowerLawKinetics) -> Subspace:
    """span of phi(target) - phi(source); needs a cycle terminal network."""
    kc = kinetic_complexes(net, k)
    if len(net.reactant_complexes) != net.n:
        raise KineticsError("kinetic order subspace needs a cycle terminal network; "
                            "use kinetic_reactant_flux_subspace")
    return _differences(kc, ((r.source, r.target) for r in net.reactions), net.m)


def cycle_terminal_part(net: Network) -> tuple[int, ...]:
    """Reactions of the maximal cycle terminal subnetwork.

    Repeatedly drops reactions whose product is not a reactant of the
    reactions still kept.
    """
    keep = set(range(net.r))
    while True:
        sources = {net.reactions[i].source for i in keep}
        drop = {i for i in keep if net.reactions[i].target not in sources}
        if not drop:
            return tuple(sorted(keep))
        keep -= drop


def kinetic_reactant_flux_subspace(net: Network, k: PowerLawKinetics) -> Subspace:
    """Image of T I_{a,R} over the maximal cycle terminal subnetwork."""
    kc = kinetic_complexes(net, k)
    arcs = [(net.reactions[i].source, net.reactions[i].target) for i in cycle_terminal_part(net)]
    return _differences(kc, arcs, net.m)


def kinetic_deficiency(net: Network, k: PowerLawKinetics) -> int:
    return net.n - len(linkage_classes(net)) - kinetic_order_subspace(net, k).dim


def kinetic_flux_subspace(net: Network, k: PowerLawKinetics) -> Subspace:
    """S~ for cycle terminal networks, S~_R otherwise."""
    if len(net.reactant_complexes) == net.n:
        return kinetic_order_subspace(net, k)
    return kinetic_reactant_flux_subspace(net, k)


# ---------------------------------------------------------------- SF-pairs

@dataclass(frozen=True)
class SFPair:
    reactions: tuple[int, int]
    species: int
    same_linkage_class: bool
    reactants_nonterminal: bool


def sf_pairs(net: Network, k: PowerLawKinetics) -> tuple[SFPair, ...]:
    """Reaction pairs whose kinetic order rows differ in exactly one species."""
    _check_shape(net, k)
    lc = reaction_linkage_class(net)
    terminal = terminal_complexes(net)
    rows = k.orders.entries
    out = []
    for i in range(net.r):
        for j in range(i + 1, net.r):
            diff = [c for c in range(net.m) if rows[i][c] != rows[j][c]]
            if len(diff) != 1:
                continue
            si, sj = net.reactions[i].source, net.reactions[j].source
            out.append(SFPair((i, j), diff[0], lc[i] == lc[j], si not in terminal and sj not in terminal))
    for p in out:
        i, j = p.reactions
        assert sum(a != b for a, b in zip(rows[i], rows[j])) == 1
    return tuple(out)


# ---------------------------------------------------------------- poly-PL

def canonical_poly_representation(k: PolyPLKinetics) -> PolyPLKinetics:
    """Pad every reaction to h = max h_i terms by splitting its last term evenly."""
    h = max(k.term_counts)
    padded = []
    for ts in k.terms:
        copies = h - len(ts) + 1
        if copies == 1:
            padded.append(ts)
            continue
        a, row = ts[-1]
        padded.append(ts[:-1] + ((a / copies, row),) * copies)
    return PolyPLKinetics(k.m, tuple(padded), k.rates)


def pl_summands(k: PolyPLKinetics) -> tuple[PowerLawKinetics, ...]:
    """K_j(x) = k_i a_ij x^f_ij for j = 1..h; needs the canonical representation."""
    if not k.is_canonical:
        raise KineticsError("pl_summands needs the canonical PL-representation")
    h = k.term_counts[0]
    out = []
    for j in range(h):
        rows = [ts[j][1] for ts in k.terms]
        rates = None if k.rates is None else [kk * ts[j][0] for kk, ts in zip(k.rates, k.terms)]
        out.append(PowerLawKinetics(Matrix.from_rows(rows, cols=k.m), rates))
    return tuple(out)


# ---------------------------------------------------------------- evaluation

ZERO_TOL = 1e-9


def _positive(x: Sequence) -> None:
    if any(float(v) <= 0 for v in x):
        raise KineticsError("evaluation point must be strictly positive")


def kinetic_vector(net: Network, k: AnyKinetics, x: Sequence) -> list:
    """K(x); exact when x and all exponents are rational-integral, float otherwise."""
    _check_shape(net, k)
    _positive(x)
    if len(x) != net.m:
        raise KineticsError("point has wrong length")
    return k.rate_values(x)


def evaluate_sfrf(net: Network, k: AnyKinetics, x: Sequence) -> np.ndarray:
    """f(x) = N K(x) in floating point."""
    kv = np.array([float(v) for v in kinetic_vector(net, k, x)])
    return stoichiometric_matrix(net).to_numpy() @ kv


def evaluate_complex_formation(net: Network, k: AnyKinetics, x: Sequence) -> np.ndarray:
    """I_a K(x); zero exactly at complex balanced points."""
    kv = np.array([float(v) for v in kinetic_vector(net, k, x)])
    return incidence_matrix(net).to_numpy() @ kv


def kinetic_jacobian(net: Network, k: AnyKinetics, x: Sequence) -> np.ndarray:
    """dK/dx at x (r x m, float)."""
    _check_shape(net, k)
    _positive(x)
    _require_rates(k.rates)
    x = np.asarray([float(v) for v in x])
    poly = k if isinstance(k, PolyPLKinetics) else PolyPLKinetics.from_power_law(k)
    dk = np.zeros((net.r, net.m))
    for i, (rate, ts) in enumerate(zip(poly.rates, poly.terms)):
        for a, row in ts:
            f = np.array([float(v) for v in row])
            val = float(rate) * float(a) * np.prod(x ** f)
            dk[i] += val * f / x
    return dk


def sfrf_jacobian(net: Network, k: AnyKinetics, x: Sequence) -> np.ndarray:
    """df/dx at x (float)."""
    return stoichiometric_matrix(net).to_numpy() @ kinetic_jacobian(net, k, x)


def is_equilibrium(net: Network, k: AnyKinetics, x: Sequence, tol: float = ZERO_TOL) -> bool:
    return bool(np.max(np.abs(evaluate_sfrf(net, k, x)), initial=0.0) <= tol)


def is_complex_balanced(net: Network, k: AnyKinetics, x: Sequence, tol: float = ZERO_TOL) -> bool:
    return bool(np.max(np.abs(evaluate_complex_formation(net, k, x)), initial=0.0) <= tol)
