"""Plain-text network files.

A file is a sequence of sections, each opened by an unindented header::

    species: A1, A2, A3, A4
    reactions:
      R1: 2 A1 -> A3
      R2: A3 -> A1 + A2
    kinetics:
      R1: A1^2
      R2: A3^0.5 * A2
    rates:
      R1 = 1
      R2 = 3/2
    decomposition:
      N1: R1, R2 @lp
    payoff:
      m = 2
      terms = 1
      f1[1] = 1 ; 0, 1
      f2[1] = 1 ; 1, 0
    lp:
      reference = 1, 1
      flux = 1, -1

``#`` starts a comment.  Numbers are integers, decimals or ``p/q`` and are
stored as exact fractions.  Without a ``kinetics`` section the network gets
mass action orders.  Every error is a :class:`ParseError` with a 1-based
line and column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .decomposition import Decomposition, DecompositionError, build_decomposition
from .kinetics import KineticsError, PolyPLKinetics, PowerLawKinetics
from .linalg import Subspace
from .network import Network, NetworkError
from .replicator import PayoffError, PayoffSystem
from .robustness import LPSet, LPSetError

SECTIONS = ("species", "reactions", "kinetics", "rates", "decomposition", "payoff", "lp")

_IDENT = r"[A-Za-z_][A-Za-z0-9_.']*"
_UNSIGNED = r"(?:\d+/\d+|\d+\.\d*|\.\d+|\d+)"
_NUMBER = rf"[+-]?{_UNSIGNED}"
_IDENT_RE = re.compile(rf"^{_IDENT}$")
_NUMBER_RE = re.compile(rf"^{_NUMBER}$")
_TERM_RE = re.compile(rf"^(?P<coeff>{_UNSIGNED})?\s*(?P<ident>{_IDENT})$")
_HEADER_RE = re.compile(r"^(?P<name>[a-z]+)\s*:(?P<rest>.*)$")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Line:
    number: int
    text: str  # comment stripped, trailing blanks removed
    indent: int

    def col(self, fragment: str, start: int = 0) -> int:
        pos = self.text.find(fragment, start)
        return (pos if pos >= 0 else 0) + 1

    def error(self, message: str, fragment: str | None = None) -> ParseError:
        return ParseError(message, self.number, self.col(fragment) if fragment else self.indent + 1)


@dataclass(frozen=True)
class BlockSpec:
    name: str
    labels: tuple[str, ...]
    lp: bool
    line: int


@dataclass(frozen=True)
class NetworkFile:
    species: tuple[str, ...]
    network: Network | None
    kinetics: PowerLawKinetics | PolyPLKinetics | None
    rates: tuple[Fraction, ...] | None
    blocks: tuple[BlockSpec, ...] = ()
    payoff: PayoffSystem | None = None
    reference: tuple[Fraction, ...] | None = None
    flux_basis: tuple[tuple[Fraction, ...], ...] | None = None
    declared_kinetics: bool = False
    path: str | None = field(default=None, compare=False)

    @property
    def power_law(self) -> PowerLawKinetics | None:
        return self.kinetics if isinstance(self.kinetics, PowerLawKinetics) else None

    def decomposition(self) -> Decomposition | None:
        if not self.blocks:
            return None
        return build_decomposition(self.network, [b.labels for b in self.blocks], [b.name for b in self.blocks])

    @property
    def lp_blocks(self) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.blocks) if b.lp)

    def declared_lp_set(self) -> LPSet | None:
        if self.flux_basis is None:
            return None
        flux = Subspace.span(self.flux_basis, len(self.species))
        return LPSet(flux, self.reference, species=self.species)


def number(text: str, line: Line) -> Fraction:
    text = text.strip()
    if not _NUMBER_RE.match(text):
        raise line.error(f"expected a number, got {text!r}", text or None)
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise line.error(f"zero denominator in {text!r}", text) from None


def _lines(text: str) -> list[Line]:
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if "\t" in body:
            body = body.expandtabs(4)
        if body.strip():
            out.append(Line(i, body, len(body) - len(body.lstrip())))
    return out


def _split_sections(lines: list[Line]) -> dict[str, tuple[Line, list[Line]]]:
    sections: dict[str, tuple[Line, list[Line]]] = {}
    current = None
    for ln in lines:
        m = _HEADER_RE.match(ln.text) if ln.indent == 0 else None
        if m and m.group("name") in SECTIONS:
            name = m.group("name")
            if name in sections:
                raise ln.error(f"section {name!r} appears twice")
            body = []
            rest = m.group("rest").strip()
            if rest:
                offset = ln.text.index(":") + 1
                pad = len(ln.text) - len(ln.text[offset:].lstrip())
                body.append(Line(ln.number, " " * pad + rest, pad))
            sections[name] = (ln, body)
            current = name
        elif current is None:
            raise ln.error("expected a section header such as 'species:'")
        elif ln.indent == 0 and m is None and current != "species":
            raise ln.error(f"unknown section header or missing indentation: {ln.text.strip()!r}")
        elif ln.indent == 0 and m is not None:
            raise ln.error(f"unknown section {m.group('name')!r}", m.group("name"))
        else:
            sections[current][1].append(ln)
    return sections


def _label_split(ln: Line, sep: str = ":") -> tuple[str, str]:
    if sep not in ln.text:
        raise ln.error(f"expected 'LABEL{sep} ...'")
    label, rest = ln.text.split(sep, 1)
    label = label.strip()
    if not _IDENT_RE.match(label):
        raise ln.error(f"invalid label {label!r}", label or None)
    return label, rest


def _parse_species(body: list[Line]) -> tuple[str, ...]:
    names: list[str] = []
    for ln in body:
        for part in ln.text.split(","):
            name = part.strip()
            if not name:
                continue
            if not _IDENT_RE.match(name):
                raise ln.error(f"invalid species name {name!r}", name)
            if name in names:
                raise ln.error(f"duplicate species {name!r}", name)
            names.append(name)
    return tuple(names)


def _parse_side(text: str, ln: Line, species: tuple[str, ...], start: int) -> dict[str, Fraction]:
    text = text.strip()
    if text == "0":
        return {}
    out: dict[str, Fraction] = {}
    for term in text.split("+"):
        term = term.strip()
        m = _TERM_RE.match(term)
        if not m:
            raise ParseError(f"malformed term {term!r}", ln.number, ln.col(term, start) if term else start + 1)
        ident = m.group("ident")
        if ident not in species:
            raise ParseError(f"unknown species {ident!r}", ln.number, ln.col(ident, start))
        coeff = Fraction(m.group("coeff")) if m.group("coeff") else Fraction(1)
        out[ident] = out.get(ident, Fraction(0)) + coeff
    return out


def _parse_reactions(body: list[Line], species: tuple[str, ...]):
    rxns = []
    seen: set[str] = set()
    for ln in body:
        label, rest = _label_split(ln)
        if label in seen:
            raise ln.error(f"duplicate reaction label {label!r}", label)
        seen.add(label)
        start = ln.text.index(":") + 1
        if "->" not in rest:
            raise ParseError("missing '->'", ln.number, len(ln.text) + 1)
        if rest.count("->") > 1:
            raise ln.error("more than one '->'", "->")
        lhs, rhs = rest.split("->")
        arrow = ln.text.index("->", start)
        rxns.append((label, _parse_side(lhs, ln, species, start), _parse_side(rhs, ln, species, arrow + 2), ln))
    return rxns


def _parse_monomial(text: str, ln: Line, species: tuple[str, ...]) -> tuple[Fraction, tuple[Fraction, ...]]:
    coeff = None
    row = [Fraction(0)] * len(species)
    factors = [f.strip() for f in text.split("*")]
    if factors == ["1"]:
        return Fraction(1), tuple(row)
    for f in factors:
        if not f:
            raise ln.error("empty factor", "*")
        if "^" in f:
            ident, exp = (p.strip() for p in f.split("^", 1))
            exp = exp[1:-1].strip() if exp.startswith("(") and exp.endswith(")") else exp
            value = number(exp, ln)
        elif _NUMBER_RE.match(f):
            if coeff is not None:
                raise ln.error("a term has at most one numeric coefficient", f)
            coeff = Fraction(f)
            continue
        else:
            ident, value = f, Fraction(1)
        if ident not in species:
            raise ln.error(f"unknown species {ident!r}", ident or None)
        row[species.index(ident)] += value
    return (Fraction(1) if coeff is None else coeff), tuple(row)


def _parse_kinetics(body: list[Line], species: tuple[str, ...], labels: list[str]):
    by_label: dict[str, tuple] = {}
    lines: dict[str, Line] = {}
    for ln in body:
        label, rest = _label_split(ln)
        if label not in labels:
            raise ln.error(f"kinetics for unknown reaction {label!r}", label)
        if label in by_label:
            raise ln.error(f"duplicate kinetics for {label!r}", label)
        terms = []
        rows = set()
        for piece in _split_terms(rest):
            if not piece.strip():
                raise ln.error("empty kinetic term")
            a, row = _parse_monomial(piece, ln, species)
            if a < 0:
                raise ln.error(f"negative poly-PL coefficient {a}", piece.strip())
            if a == 0:
                raise ln.error("zero poly-PL coefficient", piece.strip())
            if row in rows:
                raise ln.error("repeated monomial; merge the coefficients", piece.strip())
            rows.add(row)
            terms.append((a, row))
        by_label[label] = tuple(terms)
        lines[label] = ln
    missing = [lab for lab in labels if lab not in by_label]
    if missing:
        header = body[0] if body else None
        raise ParseError(f"no kinetics given for reaction(s) {', '.join(missing)}",
                         header.number if header else 1)
    return [by_label[lab] for lab in labels]


def _split_terms(text: str) -> list[str]:
    """Split on '+' that is not part of an exponent sign like ``A^+1``."""
    parts, buf = [], ""
    for i, ch in enumerate(text):
        if ch == "+" and not buf.rstrip().endswith("^"):
            parts.append(buf)
            buf = ""
        else:
            buf += ch
    parts.append(buf)
    return parts


def _parse_rates(body: list[Line], labels: list[str]) -> tuple[Fraction, ...]:
    values: dict[str, Fraction] = {}
    for ln in body:
        label, rest = _label_split(ln, "=")
        if label not in labels:
            raise ln.error(f"rate for unknown reaction {label!r}", label)
        if label in values:
            raise ln.error(f"duplicate rate for {label!r}", label)
        v = number(rest, ln)
        if v <= 0:
            raise ln.error(f"rate constants must be positive, got {v}", rest.strip())
        values[label] = v
    missing = [lab for lab in labels if lab not in values]
    if missing:
        raise ParseError(f"no rate given for reaction(s) {', '.join(missing)}", body[-1].number if body else 1)
    return tuple(values[lab] for lab in labels)


def _parse_blocks(body: list[Line], labels: list[str]) -> tuple[BlockSpec, ...]:
    out = []
    names = set()
    for ln in body:
        name, rest = _label_split(ln)
        if name in names:
            raise ln.error(f"duplicate block name {name!r}", name)
        names.add(name)
        lp = False
        if "@lp" in rest:
            lp = True
            rest = rest.replace("@lp", "")
        members = []
        for part in rest.split(","):
            lab = part.strip()
            if not lab:
                raise ln.error("empty reaction label in block")
            if lab not in labels:
                raise ln.error(f"unknown reaction {lab!r}", lab)
            members.append(lab)
        out.append(BlockSpec(name, tuple(members), lp, ln.number))
    return tuple(out)


_PAYOFF_RE = re.compile(r"^f(?P<p>\d+)\[(?P<i>\d+)\]$")


def _parse_payoff(header: Line, body: list[Line], species: tuple[str, ...]) -> PayoffSystem:
    settings: dict[str, int] = {}
    entries: dict[tuple[int, int], tuple[Fraction, tuple[Fraction, ...], Line]] = {}
    for ln in body:
        key, rest = (p.strip() for p in ln.text.split("=", 1)) if "=" in ln.text else (ln.text.strip(), None)
        if rest is None:
            raise ln.error("expected 'key = value'")
        if key in ("m", "terms"):
            v = number(rest, ln)
            if v.denominator != 1 or v < 1:
                raise ln.error(f"{key} must be a positive integer", rest)
            settings[key] = int(v)
            continue
        m = _PAYOFF_RE.match(key)
        if not m:
            raise ln.error(f"unknown payoff entry {key!r}", key)
        if ";" not in rest:
            raise ln.error("expected 'COEFF ; e1, e2, ...'", rest)
        coeff_txt, exp_txt = rest.split(";", 1)
        coeff = number(coeff_txt, ln)
        exps = tuple(number(e, ln) for e in exp_txt.split(","))
        idx = (int(m.group("p")), int(m.group("i")))
        if idx in entries:
            raise ln.error(f"duplicate payoff entry {key}", key)
        entries[idx] = (coeff, exps, ln)
    for key in ("m", "terms"):
        if key not in settings:
            raise header.error(f"payoff block needs '{key} = ...'")
    m_, h = settings["m"], settings["terms"]
    coeffs, exps = [], []
    for p in range(1, m_ + 1):
        crow, erow = [], []
        for i in range(1, h + 1):
            if (p, i) not in entries:
                raise header.error(f"payoff entry f{p}[{i}] is missing")
            c, e, ln = entries[(p, i)]
            if len(e) != m_:
                raise ln.error(f"exponent row of f{p}[{i}] has {len(e)} entries, expected {m_}")
            crow.append(c)
            erow.append(e)
        coeffs.append(crow)
        exps.append(erow)
    extra = [k for k in entries if not (1 <= k[0] <= m_ and 1 <= k[1] <= h)]
    if extra:
        p, i = extra[0]
        raise entries[extra[0]][2].error(f"payoff entry f{p}[{i}] is out of range")
    names = species if species else None
    if names is not None and len(names) != m_:
        raise header.error(f"payoff has m = {m_} but {len(names)} species are declared")
    try:
        return PayoffSystem(m_, coeffs, exps, names)
    except PayoffError as exc:
        raise header.error(str(exc)) from None


def _parse_lp(body: list[Line], m: int):
    reference = None
    flux = []
    for ln in body:
        if "=" not in ln.text:
            raise ln.error("expected 'reference = ...' or 'flux = ...'")
        key, rest = (p.strip() for p in ln.text.split("=", 1))
        vec = tuple(number(v, ln) for v in rest.split(","))
        if len(vec) != m:
            raise ln.error(f"vector has {len(vec)} entries, expected {m}", rest)
        if key == "reference":
            if reference is not None:
                raise ln.error("reference point given twice", key)
            if any(v <= 0 for v in vec):
                raise ln.error("reference point must be strictly positive", rest)
            reference = vec
        elif key == "flux":
            flux.append(vec)
        else:
            raise ln.error(f"unknown lp entry {key!r}", key)
    return reference, tuple(flux)


def parse(text: str, path: str | None = None) -> NetworkFile:
    """Parse a network file; raises :class:`ParseError` on any problem."""
    lines = _lines(text)
    if not lines:
        raise ParseError("empty file", 1)
    sections = _split_sections(lines)
    header = {name: hdr for name, (hdr, _) in sections.items()}
    body = {name: b for name, (_, b) in sections.items()}

    species = _parse_species(body["species"]) if "species" in body else ()
    payoff = _parse_payoff(header["payoff"], body["payoff"], species) if "payoff" in body else None
    if payoff is not None and not species:
        species = payoff.species
    if not species:
        raise ParseError("no species declared", lines[0].number)

    network = kinetics = rates = None
    blocks: tuple[BlockSpec, ...] = ()
    if "reactions" in body:
        rxns = _parse_reactions(body["reactions"], species)
        if not rxns:
            raise header["reactions"].error("reactions section is empty")
        labels = [r[0] for r in rxns]
        try:
            network = Network.from_reactions(species, [r[:3] for r in rxns])
        except NetworkError as exc:
            raise header["reactions"].error(str(exc)) from None
        if "rates" in body:
            rates = _parse_rates(body["rates"], labels)
        try:
            if "kinetics" in body:
                terms = _parse_kinetics(body["kinetics"], species, labels)
                if all(len(t) == 1 and t[0][0] == 1 for t in terms):
                    kinetics = PowerLawKinetics.from_rows([t[0][1] for t in terms], rates, m=len(species))
                else:
                    kinetics = PolyPLKinetics(len(species), tuple(terms), rates)
            else:
                kinetics = PowerLawKinetics.mass_action(network, rates)
        except KineticsError as exc:
            raise header.get("kinetics", header["reactions"]).error(str(exc)) from None
        if "decomposition" in body:
            blocks = _parse_blocks(body["decomposition"], labels)
    else:
        for name in ("kinetics", "rates", "decomposition"):
            if name in body:
                raise header[name].error(f"section {name!r} needs a reactions section")

    reference = flux = None
    if "lp" in body:
        reference, flux = _parse_lp(body["lp"], len(species))

    out = NetworkFile(species, network, kinetics, rates, blocks, payoff, reference, flux or None,
                      "kinetics" in body, path)
    if blocks:
        try:
            out.decomposition()
        except DecompositionError as exc:
            raise header["decomposition"].error(str(exc)) from None
    if flux is not None:
        try:
            out.declared_lp_set()
        except LPSetError as exc:
            raise header["lp"].error(str(exc)) from None
    return out


def load(path: str | Path) -> NetworkFile:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"file is not UTF-8: {exc.reason}", 1) from None
    return parse(text, str(p))
