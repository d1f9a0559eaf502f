"""Log-parametrized sets and the species hyperplane criterion.

An LP set E(P, x*) is the set of positive x with log x - log x* in the
orthogonal complement of the flux subspace P.  Robustness of a species X
over E holds exactly when that complement lies in the hyperplane x_X = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .linalg import Subspace, Vector, is_subspace_of, orthogonal_complement, species_hyperplane
from .network import Network, conservation_witness, stoichiometric_subspace

MEMBERSHIP_TOL = 1e-9
BIRCH_TOL = 1e-10


class LPKind(str, Enum):
    PLP = "PLP"
    CLP = "CLP"
    GENERIC = "generic"


class RobustnessKind(str, Enum):
    ACR = "ACR"
    BCR = "BCR"


class LPSetError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class LPSet:
    """E(P, x*).  The reference point is optional; only point-level work needs it."""

    flux: Subspace
    reference: tuple[float, ...] | None = None
    kind: LPKind = LPKind.GENERIC
    species: tuple[str, ...] | None = None

    def __post_init__(self):
        n = self.flux.ambient_dim
        if self.reference is not None:
            ref = tuple(float(v) for v in self.reference)
            if len(ref) != n:
                raise LPSetError("reference point length does not match the species space")
            if any(not v > 0 for v in ref):
                raise LPSetError("reference point must be strictly positive")
            object.__setattr__(self, "reference", ref)
        if self.species is None:
            object.__setattr__(self, "species", tuple(f"X{i + 1}" for i in range(n)))
        elif len(self.species) != n:
            raise LPSetError("species names do not match the species space")

    @property
    def dim(self) -> int:
        return self.flux.ambient_dim

    def require_reference(self) -> np.ndarray:
        if self.reference is None:
            raise LPSetError("this operation needs a reference point x*")
        return np.array(self.reference)


def parameter_subspace(e: LPSet) -> Subspace:
    return orthogonal_complement(e.flux)


def _species_index(e: LPSet, species) -> int:
    if isinstance(species, str):
        try:
            return e.species.index(species)
        except ValueError:
            raise LPSetError(f"unknown species {species!r}") from None
    if not 0 <= species < e.dim:
        raise LPSetError(f"species index {species} out of range")
    return species


def has_robustness_in(e: LPSet, species) -> bool:
    """Parameter subspace contained in the species hyperplane of ``species``."""
    k = _species_index(e, species)
    return is_subspace_of(parameter_subspace(e), species_hyperplane(e.dim, k))


@dataclass(frozen=True)
class RobustnessReport:
    kind: RobustnessKind
    species: tuple[str, ...]
    robust_species: tuple[int, ...]
    parameter_basis: Subspace
    bound: int
    zero_table: tuple[tuple[bool, ...], ...] = field(repr=False)

    @property
    def robust_names(self) -> tuple[str, ...]:
        return tuple(self.species[k] for k in self.robust_species)


def robust_species(e: LPSet, kind: RobustnessKind | str = RobustnessKind.ACR) -> RobustnessReport:
    """Species whose coordinate vanishes in every parameter-basis vector."""
    kind = RobustnessKind(kind)
    basis = parameter_subspace(e)
    # zero_table[k][i]: coordinate k of basis vector i is zero
    table = tuple(tuple(v[k] == 0 for v in basis.vectors) for k in range(e.dim))
    robust = tuple(k for k in range(e.dim) if all(table[k]))
    if len(robust) > e.flux.dim:
        raise AssertionError("robust species count exceeds dim P; subspace computation is broken")
    return RobustnessReport(kind, e.species, robust, basis, e.flux.dim, table)


def _orthonormal(s: Subspace) -> np.ndarray:
    """Rows form an orthonormal basis of s (float)."""
    if s.dim == 0:
        return np.zeros((0, s.ambient_dim))
    q, _ = np.linalg.qr(s.basis.to_numpy().T)
    return q.T


def log_coordinates(e: LPSet, x: Sequence[float], tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """Coefficients of log x - log x* in the canonical parameter basis."""
    ref = e.require_reference()
    x = np.asarray(x, dtype=float)
    if x.shape != ref.shape or np.any(x <= 0):
        raise LPSetError("point must be strictly positive with the right length")
    d = np.log(x) - np.log(ref)
    flux = _orthonormal(e.flux)
    residual = float(np.linalg.norm(flux.T @ (flux @ d))) if flux.size else 0.0
    if residual > tol:
        raise LPSetError(f"point is not in the LP set (flux-component norm {residual:.3e})")
    basis = parameter_subspace(e).basis.to_numpy()
    if basis.shape[0] == 0:
        return np.zeros(0)
    coeffs, *_ = np.linalg.lstsq(basis.T, d, rcond=None)
    return coeffs


def from_log_coordinates(e: LPSet, coeffs: Sequence[float]) -> np.ndarray:
    ref = e.require_reference()
    basis = parameter_subspace(e).basis.to_numpy()
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (basis.shape[0],):
        raise LPSetError("coefficient vector has wrong length")
    return ref * np.exp(basis.T @ coeffs) if basis.shape[0] else ref.copy()


@dataclass(frozen=True)
class BirchResult:
    point: np.ndarray
    iterations: int
    lp_residual: float
    flux_class_residual: float


def birch_point(
    e: LPSet,
    q: Sequence[float],
    *,
    start: Sequence[float] | None = None,
    tol: float = BIRCH_TOL,
    max_iter: int = 200,
) -> BirchResult:
    """The unique point of E(P, x*) in the flux class (q + P) of the positive orthant.

    Writes x = x* exp(W^T lam) with W an orthonormal basis of P^perp and
    minimises sum(x) - lam . W q, which is strictly convex with gradient
    W (x - q).  Damped Newton with step halving; ``start`` (any positive
    vector) seeds lam by projecting its log-deviation onto P^perp.
    """
    ref = e.require_reference()
    q = np.asarray(q, dtype=float)
    if q.shape != ref.shape or np.any(~(q > 0)):
        raise LPSetError("q must be strictly positive with the right length")
    w = _orthonormal(parameter_subspace(e))
    p = _orthonormal(e.flux)
    if w.shape[0] == 0:
        return BirchResult(ref.copy(), 0, 0.0, 0.0)

    lam = np.zeros(w.shape[0]) if start is None else w @ (np.log(np.asarray(start, float)) - np.log(ref))
    wq = w @ q

    def point(l):
        return ref * np.exp(w.T @ l)

    def merit(l):
        return float(np.sum(point(l)) - l @ wq)

    def residuals(x):
        d = np.log(x) - np.log(ref)
        lp_res = float(np.linalg.norm(p.T @ (p @ d))) if p.size else 0.0
        return lp_res, float(np.linalg.norm(w @ (x - q)))

    x = point(lam)
    it = 0
    for it in range(1, max_iter + 1):
        grad = w @ (x - q)
        if np.linalg.norm(grad) < tol * 1e-2:
            break
        hess = (w * x) @ w.T
        step = np.linalg.solve(hess, -grad)
        f0 = merit(lam)
        slope = float(grad @ step)
        t = 1.0
        while t > 1e-12:
            cand = lam + t * step
            fc = merit(cand)
            if np.isfinite(fc) and fc <= f0 + 1e-4 * t * slope:
                break
            # near the optimum the merit decrease drowns in rounding; fall back to the gradient norm
            if np.isfinite(fc) and np.linalg.norm(w @ (point(cand) - q)) < (1 - 1e-4 * t) * np.linalg.norm(grad):
                break
            t *= 0.5
        new_lam = lam + t * step
        if np.allclose(new_lam, lam, rtol=0.0, atol=0.0):
            break
        lam = new_lam
        x = point(lam)
    lp_res, fc_res = residuals(x)
    if not (lp_res < tol and fc_res < tol):
        raise ConvergenceError(
            "Birch point solver did not converge",
            {"iterations": it, "lp_residual": lp_res, "flux_class_residual": fc_res, "point": x.tolist()},
        )
    return BirchResult(x, it, lp_res, fc_res)


@dataclass(frozen=True)
class ConservativityDiagnostics:
    conservative: bool
    witness: Vector | None
    robust_species: tuple[int, ...]
    consistent: bool
    messages: tuple[str, ...]


def conservativity_diagnostics(net: Network, e: LPSet, *, complex_balanced: bool = False) -> ConservativityDiagnostics:
    """Consequences of the hyperplane criterion for mass action LP systems.

    ``e`` must have the stoichiometric subspace as its flux subspace.
    ``complex_balanced`` states that the mass action system has a complex
    balanced equilibrium (so it is a CLP system with P = S).
    """
    if e.flux != stoichiometric_subspace(net):
        raise LPSetError("conservativity diagnostics need an LP set with flux subspace S")
    witness = conservation_witness(net)
    conservative = witness is not None
    robust = robust_species(e).robust_species
    msgs = []
    consistent = True
    if robust:
        if conservative:
            consistent = False
            msgs.append("inconsistent: a conservative mass action system with ACR/BCR cannot be an LP system")
        else:
            msgs.append("robust species present, network is nonconservative as required")
    else:
        msgs.append("no robust species")
    if conservative and complex_balanced:
        msgs.append("complex balanced conservative mass action system: no ACR or BCR in any species")
    elif not conservative:
        msgs.append("nonconservative: robustness is permitted")
    return ConservativityDiagnostics(conservative, witness, robust, consistent, tuple(msgs))


def bi_lp_check(plp: LPSet, clp: LPSet) -> bool:
    """Equal flux subspaces, i.e. the system is absolutely complex balanced."""
    if plp.dim != clp.dim:
        raise LPSetError("LP sets live in different species spaces")
    return plp.flux == clp.flux


def sample_lp_set(e: LPSet, coeffs: np.ndarray) -> np.ndarray:
    """Points x* exp(B^T c) for each row c of ``coeffs`` (B the canonical parameter basis)."""
    ref = e.require_reference()
    basis = parameter_subspace(e).basis.to_numpy()
    return ref * np.exp(np.atleast_2d(coeffs) @ basis)
