"""Command line driver: ``crnlp <command> FILE [options]``.

Writes a JSON report to stdout.  Exit status 0 on success, 1 when an
analysis precondition fails (the JSON then carries ``"status": "failed"``
and an ``error`` message), 2 on a parse or validation error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from . import report as rp
from .decomposition import (
    DecompositionError,
    block_kinetics,
    building_blocks_acr,
    building_blocks_bcr,
    certified_block_lp_sets,
    decomposition_flux_subspace,
    is_incidence_independent,
    is_independent,
    is_kinetic_independent,
    lp_certificate,
    lp_control_report,
    propagate_robustness,
)
from .fileformat import NetworkFile, ParseError, load, number, Line
from .kinetics import (
    KineticsError,
    PLKind,
    PowerLawKinetics,
    classify_plk,
    is_pl_tik,
    kinetic_deficiency,
    kinetic_flux_subspace,
    sf_pairs,
)
from .network import NetworkError, stoichiometric_subspace, structural_report
from .replicator import (
    ConditionError,
    PayoffError,
    build_replicator_network,
    check_condition,
    equilibrium_search,
    replicator_kinetics,
    uniqueness_report,
)
from .robustness import (
    ConvergenceError,
    LPKind,
    LPSet,
    LPSetError,
    RobustnessKind,
    birch_point,
    conservativity_diagnostics,
    robust_species,
)


class PreconditionError(Exception):
    """An analysis cannot run on this input (exit status 1)."""


def _need_network(nf: NetworkFile):
    if nf.network is None:
        raise PreconditionError("this command needs a reactions section")
    return nf.network


def _need_power_law(nf: NetworkFile) -> PowerLawKinetics:
    _need_network(nf)
    if nf.power_law is None:
        raise PreconditionError("this command needs power-law kinetics (one monomial per reaction)")
    return nf.power_law


def _need_decomposition(nf: NetworkFile):
    d = nf.decomposition()
    if d is None:
        raise PreconditionError("this command needs a decomposition section")
    return d


def _is_mass_action(nf: NetworkFile) -> bool:
    k = nf.power_law
    return k is not None and k.orders == PowerLawKinetics.mass_action(nf.network).orders


def _kinetics_summary(nf: NetworkFile) -> dict:
    net, k = nf.network, nf.kinetics
    if not isinstance(k, PowerLawKinetics):
        return {"type": "poly-PL", "term_counts": list(k.term_counts)}
    out = {"type": "power-law", "mass_action": _is_mass_action(nf), "class": classify_plk(net, k),
           "orders": [list(row) for row in k.orders.entries]}
    if out["class"] is PLKind.RDK:
        out["pl_tik"] = is_pl_tik(net, k)
        out["kinetic_flux_subspace"] = rp.subspace(kinetic_flux_subspace(net, k))
        if len(net.reactant_complexes) == net.n:
            out["kinetic_deficiency"] = kinetic_deficiency(net, k)
        out["sf_pairs"] = [
            {"reactions": [net.reactions[j].label for j in p.reactions], "species": net.species[p.species],
             "same_linkage_class": p.same_linkage_class}
            for p in sf_pairs(net, k)
        ]
    return out


def cmd_analyze(nf: NetworkFile, args) -> dict:
    net = _need_network(nf)
    rep = structural_report(net)
    return {**rp.structural(net, rep), "kinetics": _kinetics_summary(nf)}


def _flux(nf: NetworkFile, source: str, kind: RobustnessKind) -> tuple[LPSet, dict]:
    lp_kind = LPKind.PLP if kind is RobustnessKind.ACR else LPKind.CLP
    extra: dict = {}
    if source == "declared":
        e = nf.declared_lp_set()
        if e is None:
            raise PreconditionError("--flux declared needs an lp section with flux vectors")
        return e, extra
    net = _need_network(nf)
    if source == "stoich":
        if not _is_mass_action(nf):
            raise PreconditionError("--flux stoich applies to mass action systems only")
        return LPSet(stoichiometric_subspace(net), nf.reference, lp_kind, net.species), extra
    k = _need_power_law(nf)
    if classify_plk(net, k) is PLKind.RDK:
        return LPSet(kinetic_flux_subspace(net, k), nf.reference, lp_kind, net.species), extra
    d = nf.decomposition()
    if d is None:
        raise PreconditionError("kinetics are PL-NDK: --flux kinetic needs a decomposition into PL-RDK blocks")
    for i, sub in enumerate(d.subnetworks):
        if classify_plk(sub, block_kinetics(d, k, i)) is not PLKind.RDK:
            raise PreconditionError(f"block {d.names[i]} is PL-NDK")
    extra["decomposition"] = list(d.names)
    extra["blocks_direct_sum"] = is_kinetic_independent(d, k)
    return LPSet(decomposition_flux_subspace(d, k), nf.reference, lp_kind, net.species), extra


def cmd_robustness(nf: NetworkFile, args) -> dict:
    kind = RobustnessKind(args.kind.upper())
    e, extra = _flux(nf, args.flux, kind)
    rep = robust_species(e, kind)
    out = {**rp.robustness(rep, e.flux, args.flux), **extra}
    if args.flux == "stoich":
        diag = conservativity_diagnostics(nf.network, e, complex_balanced=args.complex_balanced)
        out["conservativity"] = rp.conservativity(diag, nf.species)
    return out


def cmd_decompose(nf: NetworkFile, args) -> dict:
    kind = RobustnessKind(args.kind.upper())
    net = _need_network(nf)
    d = _need_decomposition(nf)
    out = {
        **rp.decomposition(d),
        "kind": kind,
        "independent": is_independent(d),
        "incidence_independent": is_incidence_independent(d),
        "stoichiometric_dims": [structural_report(s).s for s in d.subnetworks],
        "rank": structural_report(net).s,
    }
    k = nf.power_law
    if k is not None:
        rdk = all(classify_plk(s, block_kinetics(d, k, i)) is PLKind.RDK for i, s in enumerate(d.subnetworks))
        out["blocks_pl_rdk"] = rdk
        if rdk:
            out["kinetic_independent"] = is_kinetic_independent(d, k)
    need = "independent" if kind is RobustnessKind.ACR else "incidence_independent"
    if not out[need]:
        raise PreconditionError(f"decomposition is not {need.replace('_', ' ')}", out)
    if k is not None and out.get("blocks_pl_rdk"):
        lp = certified_block_lp_sets(d, k, kind, nf.lp_blocks)
        control = lp_control_report(d, lp, kind)
        out["lp_control"] = rp.lp_control(d, control)
        per_block = [b.robust_species or () for b in control.blocks]
        out["propagated_robust_species"] = [net.species[x] for x in sorted(propagate_robustness(d, per_block, kind))]
    return out


def cmd_blocks(nf: NetworkFile, args) -> dict:
    kind = RobustnessKind(args.kind.upper())
    net = _need_network(nf)
    k = _need_power_law(nf)
    d = _need_decomposition(nf)
    witness = None
    if args.witness is not None:
        witness = [float(v) for v in _vector(args.witness, net.m, "--witness")]
        if k.rates is None:
            raise PreconditionError("--witness needs a rates section")
    assumed = args.assume_equilibrium or witness is not None
    if not assumed:
        what = "positive" if kind is RobustnessKind.ACR else "complex balanced"
        raise PreconditionError(f"building blocks need a {what} equilibrium: pass --assume-equilibrium or --witness")
    run = building_blocks_acr if kind is RobustnessKind.ACR else building_blocks_bcr
    findings = run(net, k, d, True, asserted_lp=nf.lp_blocks, witness=witness)
    certs = {}
    for i, sub in enumerate(d.subnetworks):
        kb = block_kinetics(d, k, i)
        if classify_plk(sub, kb) is PLKind.RDK and len(sub.reactant_complexes) == sub.n:
            certs[d.names[i]] = lp_certificate(sub, kb, kind, i in nf.lp_blocks)
        else:
            certs[d.names[i]] = None
    return {
        "kind": kind,
        "findings": [rp.finding(d, f) for f in findings],
        "robust_species": [net.species[f.species] for f in findings],
        "lp_certificates": certs,
    }


def cmd_replicator(nf: NetworkFile, args) -> dict:
    p = nf.payoff
    if p is None:
        raise PreconditionError("replicator needs a payoff section")
    cond = check_condition(p)
    out = {"m": p.m, "terms": p.h_prime, "condition": rp.condition(cond)}
    if not cond.holds:
        i, j, why = cond.failures[0]
        raise PreconditionError(f"condition fails at term {i + 1}, species {j + 1}: {why}", out)
    u = uniqueness_report(p)
    out.update(rp.uniqueness(u))
    if args.starts > 0:
        net = build_replicator_network(p.m, p.species)
        kin = replicator_kinetics(p)
        rng = np.random.default_rng(args.seed)
        points = [equilibrium_search(net, kin, np.exp(rng.uniform(-2.0, 2.0, p.m))) for _ in range(args.starts)]
        found = np.array([x for x in points if x is not None])
        search = {"starts": args.starts, "converged": int(len(found))}
        if len(found):
            search["point"] = found.mean(axis=0)
            search["spread"] = float(np.max(np.abs(found - found[0])))
        else:
            search["note"] = "no start reached a positive equilibrium"
        out["equilibrium_search"] = search
    return out


def cmd_birch(nf: NetworkFile, args) -> dict:
    e = nf.declared_lp_set()
    if e is None:
        raise PreconditionError("birch needs an lp section with flux vectors")
    if e.reference is None:
        raise PreconditionError("birch needs a reference point (lp: reference = ...)")
    q = [float(v) for v in _vector(args.point, e.dim, "--point")]
    return {"q": q, **rp.birch(birch_point(e, q))}


def _vector(text: str, m: int, flag: str):
    ln = Line(0, text, 0)
    try:
        vec = [number(v, ln) for v in text.split(",")]
    except ParseError as exc:
        raise ParseError(f"{flag}: {exc.message}", 0, exc.column) from None
    if len(vec) != m:
        raise ParseError(f"{flag} needs {m} comma-separated values, got {len(vec)}", 0)
    return vec


COMMANDS = {
    "analyze": cmd_analyze,
    "robustness": cmd_robustness,
    "decompose": cmd_decompose,
    "blocks": cmd_blocks,
    "replicator": cmd_replicator,
    "birch": cmd_birch,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crnlp", description="Robustness analysis of power-law reaction networks.")
    parser.add_argument("--verbose", action="store_true", help="print a short summary on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file")
        p.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS)
        return p

    add("analyze", "structural and kinetic indices")
    p = add("robustness", "robust species via the species hyperplane criterion")
    p.add_argument("--kind", choices=("acr", "bcr"), default="acr")
    p.add_argument("--flux", choices=("stoich", "kinetic", "declared"), default="kinetic")
    p.add_argument("--complex-balanced", action="store_true",
                   help="assert a complex balanced equilibrium (stoich flux diagnostics)")
    p = add("decompose", "independence tests and robustness propagation")
    p.add_argument("--kind", choices=("acr", "bcr"), default="acr")
    p = add("blocks", "building-block findings")
    p.add_argument("--kind", choices=("acr", "bcr"), default="acr")
    p.add_argument("--assume-equilibrium", action="store_true")
    p.add_argument("--witness", help="comma-separated equilibrium to check numerically")
    p = add("replicator", "uniqueness pipeline for replicator systems")
    p.add_argument("--starts", type=int, default=20, help="random starts for the equilibrium search")
    p.add_argument("--seed", type=int, default=0)
    p = add("birch", "the point of a declared LP set in the flux class of q")
    p.add_argument("--point", required=True)
    return parser


def _summary(command: str, out: dict) -> str:
    keys = ("deficiency", "robust_species", "independent", "incidence_independent", "unique_equilibrium", "point")
    parts = [f"{k}={out[k]}" for k in keys if k in out]
    return f"{command}: " + (", ".join(parts) if parts else out.get("status", "ok"))


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out: dict = {"command": args.command}
    code = 0
    try:
        nf = load(args.file)
        out.update(COMMANDS[args.command](nf, args))
        out["status"] = "ok"
    except (ParseError, NetworkError, PayoffError, OSError) as exc:
        code = 2
        out.update(status="invalid", error=str(exc))
    except PreconditionError as exc:
        code = 1
        if len(exc.args) > 1:
            out.update(exc.args[1])
        out.update(status="failed", error=exc.args[0])
    except (DecompositionError, KineticsError, LPSetError, ConditionError, ConvergenceError) as exc:
        code = 1
        out.update(status="failed", error=str(exc))
    sys.stdout.write(rp.emit_report(out))
    if args.verbose or code:
        sys.stderr.write((_summary(args.command, out) if code == 0 else f"error: {out['error']}") + "\n")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
