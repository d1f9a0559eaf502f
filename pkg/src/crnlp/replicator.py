"""Reaction network representation of replicator dynamics with poly-PL payoffs.

Species X_1..X_m, reactions X_i -> 2X_i with rate X_i f_i(x) and
2X_i -> X_i with rate X_i phi(x), where phi = sum_p X_p f_p is the
average payoff.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .kinetics import (
    PLKind,
    PolyPLKinetics,
    PowerLawKinetics,
    canonical_poly_representation,
    classify_plk,
    is_pl_tik,
    kinetic_deficiency,
    kinetic_jacobian,
    kinetic_reactant_flux_subspace,
    kinetic_vector,
)
from .linalg import Subspace, as_vector, subspace_sum
from .network import Network, stoichiometric_matrix, structural_report
from .robustness import LPKind, LPSet, parameter_subspace, robust_species


class PayoffError(ValueError):
    pass


class ConditionError(ValueError):
    def __init__(self, message: str, failures):
        super().__init__(message)
        self.failures = failures


@dataclass(frozen=True)
class PayoffSystem:
    """f_p(x) = sum_i a[p][i] prod_j x_j^g[p][i][j] for p = 1..m, i = 1..h'."""

    m: int
    coefficients: tuple[tuple[Fraction, ...], ...]
    exponents: tuple[tuple[tuple[Fraction, ...], ...], ...]
    species: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.m < 1:
            raise PayoffError("need at least one species")
        coeffs = tuple(as_vector(row) for row in self.coefficients)
        exps = tuple(tuple(as_vector(g) for g in rows) for rows in self.exponents)
        if len(coeffs) != self.m or len(exps) != self.m:
            raise PayoffError(f"expected {self.m} payoff functions")
        h = len(coeffs[0])
        if h < 1 or any(len(c) != h for c in coeffs) or any(len(e) != h for e in exps):
            raise PayoffError("every payoff function needs the same number of terms")
        if any(len(g) != self.m for rows in exps for g in rows):
            raise PayoffError(f"exponent rows must have length {self.m}")
        if any(a < 0 for row in coeffs for a in row):
            raise PayoffError("payoff coefficients must be nonnegative for a reaction network representation")
        if any(all(a == 0 for a in row) for row in coeffs):
            raise PayoffError("a payoff function is identically zero")
        names = self.species or tuple(f"X{i + 1}" for i in range(self.m))
        if len(names) != self.m:
            raise PayoffError("species names do not match m")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "species", tuple(names))

    @property
    def h_prime(self) -> int:
        return len(self.coefficients[0])

    def payoffs(self, x: Sequence[float]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.array([
            sum(float(a) * np.prod(x ** np.array([float(v) for v in g]))
                for a, g in zip(self.coefficients[p], self.exponents[p]))
            for p in range(self.m)
        ])

    def replicator_field(self, x: Sequence[float]) -> np.ndarray:
        """x_i (f_i(x) - phi(x))."""
        x = np.asarray(x, dtype=float)
        f = self.payoffs(x)
        return x * (f - x @ f)


def build_replicator_network(m: int, species: Sequence[str] | None = None) -> Network:
    if m < 1:
        raise PayoffError("m must be at least 1")
    names = tuple(species) if species is not None else tuple(f"X{i + 1}" for i in range(m))
    rxns = []
    for i, x in enumerate(names):
        rxns.append((f"F{i + 1}", {x: 1}, {x: 2}))
        rxns.append((f"B{i + 1}", {x: 2}, {x: 1}))
    return Network.from_reactions(names, rxns)


def _merge(terms) -> tuple:
    acc: dict[tuple, Fraction] = defaultdict(Fraction)
    for a, row in terms:
        if a != 0:
            acc[row] += a
    return tuple((a, row) for row, a in acc.items())


def replicator_kinetics(p: PayoffSystem, rates: Sequence | None = None) -> PolyPLKinetics:
    """Canonical poly-PL kinetics of the replicator network (rates default to 1).

    Monomials with equal exponent rows are merged before padding.
    """
    m = p.m
    unit = [tuple(Fraction(int(j == i)) for j in range(m)) for i in range(m)]

    def shifted(row, *units):
        return tuple(v + sum(u[j] for u in units) for j, v in enumerate(row))

    terms = []
    for i in range(m):
        fwd = [(a, shifted(g, unit[i])) for a, g in zip(p.coefficients[i], p.exponents[i])]
        bwd = [(a, shifted(g, unit[i], unit[q]))
               for q in range(m) for a, g in zip(p.coefficients[q], p.exponents[q])]
        terms.append(_merge(fwd))
        terms.append(_merge(bwd))
    if rates is None:
        rates = [1] * (2 * m)
    return canonical_poly_representation(PolyPLKinetics(m, tuple(terms), as_vector(rates)))


@dataclass(frozen=True)
class ConditionResult:
    holds: bool
    vacuous: bool
    failures: tuple[tuple[int, int, str], ...]  # (term i, species j, reason), 0-based
    singletons: dict


def check_condition(p: PayoffSystem) -> ConditionResult:
    """For every term i and species j the off-diagonal exponents {g[q][i][j] : q != j}
    form a singleton differing from the diagonal exponent g[j][i][j]."""
    failures = []
    singletons = {}
    for i in range(p.h_prime):
        for j in range(p.m):
            off = {p.exponents[q][i][j] for q in range(p.m) if q != j}
            diag = p.exponents[j][i][j]
            if not off:
                continue
            if len(off) != 1:
                failures.append((i, j, f"off-diagonal exponents {sorted(off)} are not a singleton"))
            elif diag in off:
                failures.append((i, j, f"off-diagonal exponent {diag} equals the diagonal exponent"))
            else:
                singletons[(i, j)] = next(iter(off))
    return ConditionResult(not failures, p.m == 1, tuple(failures), singletons)


def replicator_summands(p: PayoffSystem) -> tuple[PowerLawKinetics, ...]:
    """Kinetic orders of a PL decomposition indexed by (payoff term i, player q).

    Summand (i, q) gives forward reaction j the exponent row of X_j times term i
    of f_j, and backward reaction j that of X_j X_q times term i of f_q.  With
    the forward monomials split evenly over q these add up to the replicator
    kinetics.  Unlike the lexicographic canonical summands, each of these has
    a full kinetic order subspace whenever the condition holds.
    """
    m = p.m
    unit = [tuple(Fraction(int(j == i)) for j in range(m)) for i in range(m)]
    out = []
    for i in range(p.h_prime):
        for q in range(m):
            rows = []
            for j in range(m):
                rows.append(tuple(a + b for a, b in zip(p.exponents[j][i], unit[j])))
                rows.append(tuple(a + b + c for a, b, c in zip(p.exponents[q][i], unit[j], unit[q])))
            out.append(PowerLawKinetics.from_rows(rows, m=m))
    return tuple(out)


@dataclass(frozen=True)
class SummandFacts:
    term: int
    player: int
    pl_rdk: bool
    pl_tik: bool
    kinetic_flux_subspace: Subspace
    kinetic_deficiency: int


@dataclass(frozen=True)
class UniquenessReport:
    m: int
    vacuous_condition: bool
    weakly_reversible: bool
    n_minus_ell: int
    summands: tuple[SummandFacts, ...]
    flux_subspace: Subspace
    parameter_subspace: Subspace
    robust_species: tuple[int, ...]
    species: tuple[str, ...]
    unique_equilibrium: bool


def uniqueness_report(p: PayoffSystem) -> UniquenessReport:
    """Recompute every link from the condition to a unique equilibrium with ACR in all species.

    ``unique_equilibrium`` means the complex balanced set is at most one
    point. Existence is not checked here; payoffs meeting the condition can
    still lack a positive equilibrium (see :func:`equilibrium_search`).
    """
    cond = check_condition(p)
    if not cond.holds:
        i, j, why = cond.failures[0]
        raise ConditionError(f"condition fails at term {i + 1}, species {j + 1}: {why}", cond.failures)
    net = build_replicator_network(p.m, p.species)
    rep = structural_report(net)
    facts = []
    for idx, summand in enumerate(replicator_summands(p)):
        term, player = divmod(idx, p.m)
        if classify_plk(net, summand) is not PLKind.RDK:
            facts.append(SummandFacts(term, player, False, False, Subspace.zero(p.m), -1))
            continue
        facts.append(SummandFacts(term, player, True, is_pl_tik(net, summand),
                                  kinetic_reactant_flux_subspace(net, summand),
                                  kinetic_deficiency(net, summand)))
    flux = subspace_sum([f.kinetic_flux_subspace for f in facts])
    lp = LPSet(flux, kind=LPKind.CLP, species=p.species)
    robust = robust_species(lp).robust_species
    param = parameter_subspace(lp)
    unique = (rep.weakly_reversible and all(f.pl_tik and f.kinetic_deficiency == 0 for f in facts)
              and all(f.kinetic_flux_subspace.dim == p.m for f in facts) and param.dim == 0)
    return UniquenessReport(p.m, cond.vacuous, rep.weakly_reversible, rep.n - rep.ell, tuple(facts),
                            flux, param, robust, p.species, unique)


def _newton(resid, jac, u, tol, max_iter):
    r = resid(u)
    for _ in range(max_iter):
        nr = float(np.linalg.norm(r))
        if nr < tol:
            return u
        step, *_ = np.linalg.lstsq(jac(u), -r, rcond=None)
        t = 1.0
        while t > 1e-10:
            cand = u + t * step
            rc = None
            if np.all(np.abs(cand) < 60):
                try:
                    rc = resid(cand)
                except (OverflowError, ZeroDivisionError):
                    pass
            if rc is not None and np.all(np.isfinite(rc)) and np.linalg.norm(rc) < (1 - 1e-4 * t) * nr:
                break
            t *= 0.5
        else:
            return None
        u, r = cand, rc
    return u if float(np.linalg.norm(r)) < tol else None


def equilibrium_search(
    net: Network,
    kinetics,
    start: Sequence[float],
    *,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> np.ndarray | None:
    """Damped Newton for a positive equilibrium, in log coordinates.

    Two residuals are tried in turn: the per-capita rates f_i(x) / x_i, and
    f_i divided by the gross turnover sum_j |N_ij| K_j(x).  Only the second
    is scale free, so a point is accepted only when it is a root of that one;
    this rejects points where all rates merely become tiny.  Returns None
    when neither iteration reaches an accepted root.
    """
    n = stoichiometric_matrix(net).to_numpy()
    gross = np.abs(n)

    def parts(v):
        x = np.exp(v)
        kv = np.array([float(c) for c in kinetic_vector(net, kinetics, x)])
        dk = kinetic_jacobian(net, kinetics, x) * x[None, :]  # dK/du
        return x, n @ kv, gross @ kv, n @ dk, gross @ dk

    def capita(v):
        x, f, *_ = parts(v)
        return f / x

    def capita_jac(v):
        x, f, _, df, _ = parts(v)
        return df / x[:, None] - np.diag(f / x)

    def scaled(v):
        _, f, g, *_ = parts(v)
        return f / g

    def scaled_jac(v):
        _, f, g, df, dg = parts(v)
        return (df * g[:, None] - f[:, None] * dg) / (g ** 2)[:, None]

    u0 = np.log(np.asarray(start, dtype=float))
    for resid, jac in ((capita, capita_jac), (scaled, scaled_jac)):
        try:
            u = _newton(resid, jac, u0, tol, max_iter)
            if u is not None and float(np.linalg.norm(scaled(u))) < max(tol, 1e-10):
                return np.exp(u)
        except (OverflowError, ZeroDivisionError, FloatingPointError):
            continue
    return None
