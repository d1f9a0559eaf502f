import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from crnlp.linalg import rank
from crnlp.network import (
    Network,
    NetworkError,
    conservation_witness,
    deficiency,
    incidence_matrix,
    linkage_classes,
    stoichiometric_matrix,
    stoichiometric_subspace,
    strong_linkage_classes,
    structural_report,
    subnetwork,
    terminal_strong_linkage_classes,
)
from crnlp.replicator import build_replicator_network

from helpers import example1, random_network, schmitz


def names(net, classes):
    return [sorted(net.complex_str(c) for c in cls) for cls in classes]


def test_example1_matrices():
    net = example1().network
    s = stoichiometric_matrix(net)
    assert s.shape == (4, 5)
    assert s.column(0) == (-2, 0, 1, 0)
    assert s.row(0) == (-2, 0, 0, 0, -2)
    inc = incidence_matrix(net)
    assert inc.shape == (4, 5)
    assert all(sum(inc.column(j)) == 0 for j in range(5))
    assert rank(inc) == 3


def test_example1_classes():
    net = example1().network
    assert names(net, linkage_classes(net)) == [sorted(["2 A1", "A3", "A2 + A3", "3 A4"])]
    assert sorted(names(net, strong_linkage_classes(net))) == sorted([["A2 + A3", "A3"], ["2 A1"], ["3 A4"]])
    assert names(net, terminal_strong_linkage_classes(net)) == [["A2 + A3", "A3"]]


def test_small_networks():
    ab = Network.from_reactions(["A", "B"], [("R1", {"A": 1}, {"B": 1})])
    assert stoichiometric_matrix(ab).column(0) == (-1, 1)
    assert incidence_matrix(ab).column(0) == (-1, 1)

    cyc = Network.from_reactions(["A", "B"], [("R1", {"A": 1}, {"B": 1}), ("R2", {"B": 1}, {"A": 1})])
    rep = structural_report(cyc)
    assert rank(incidence_matrix(cyc)) == 1
    assert rep.deficiency == 0 and rep.weakly_reversible and rep.conservative
    assert rep.conservation_witness == (1, 1)
    assert len(terminal_strong_linkage_classes(cyc)) == 1

    chain = Network.from_reactions(["A", "B", "C"], [("R1", {"A": 1}, {"B": 1}), ("R2", {"B": 1}, {"C": 1})])
    assert len(strong_linkage_classes(chain)) == 3
    assert names(chain, terminal_strong_linkage_classes(chain)) == [["C"]]

    two = Network.from_reactions(["A", "B", "C", "D"], [("R1", {"A": 1}, {"B": 1}), ("R2", {"C": 1}, {"D": 1})])
    assert len(linkage_classes(two)) == 2


def test_replicator_network_structure():
    rep = structural_report(build_replicator_network(2))
    assert (rep.n, rep.ell, rep.s, rep.deficiency) == (4, 2, 2, 0)
    assert rep.weakly_reversible


def test_schmitz_blocks():
    nf = schmitz()
    net = nf.network
    assert structural_report(net).ell == 1
    n1 = subnetwork(net, range(4))
    n2 = subnetwork(net, range(4, 8))
    assert rank(stoichiometric_matrix(n1)) == 2
    assert rank(stoichiometric_matrix(n2)) == 3
    full = subnetwork(net, range(8))
    assert full.n == net.n and full.r == net.r
    assert stoichiometric_subspace(full) == stoichiometric_subspace(net)


def test_schmitz_kinetic_network_has_two_linkage_classes():
    r = Fraction
    kn = Network.from_reactions(["M1", "M2", "M3", "M4", "M5", "M6"], [
        ("r1", {"M5": 1}, {"M1": r(9, 25)}), ("r2", {"M1": r(9, 25)}, {"M5": 1}),
        ("r3", {"M5": 1}, {"M6": 1}), ("r4", {"M6": 1}, {"M1": r(9, 25)}),
        ("r5", {"M2": r(47, 5)}, {"M1": 1}), ("r6", {"M4": 1}, {"M2": r(47, 5)}),
        ("r7", {"M1": 1}, {"M3": 1}), ("r8", {"M3": 1}, {"M4": 1}),
    ])
    assert len(linkage_classes(kn)) == 2
    assert stoichiometric_matrix(kn).column(0) == (r(9, 25), 0, 0, 0, -1, 0)


def test_equal_complexes_merge():
    net = Network.from_reactions(["A", "B"], [
        ("R1", {"A": 1, "B": 0}, {"B": "0.5"}), ("R2", {"B": Fraction(1, 2)}, {"A": 1}),
    ])
    assert net.n == 2


@pytest.mark.parametrize("build, message", [
    (lambda: Network.from_reactions(["A", "A"], [("R1", {"A": 1}, {})]), "duplicate species"),
    (lambda: Network.from_reactions(["A"], [("R1", {"A": 1}, {"A": 1})]), "self-loop"),
    (lambda: Network.from_reactions(["A"], [("R1", {"A": 1}, {}), ("R2", {"A": 1}, {})]), "duplicates"),
    (lambda: Network.from_reactions(["A"], [("R1", {"A": 1}, {}), ("R1", {}, {"A": 1})]), "duplicate reaction"),
    (lambda: Network.from_reactions(["A"], [("R1", {"A": -1}, {})]), "negative"),
    (lambda: Network.from_reactions(["A"], [("R1", {"B": 1}, {})]), "unknown species"),
    (lambda: Network(("A",), ((Fraction(1),), (Fraction(0),), (Fraction(2),)),
                     (Network.from_reactions(["A"], [("R1", {"A": 1}, {})]).reactions)), "isolated"),
])
def test_validation(build, message):
    with pytest.raises(NetworkError, match=message):
        build()


def test_subnetwork_errors():
    net = example1().network
    with pytest.raises(NetworkError):
        subnetwork(net, [])
    with pytest.raises(NetworkError):
        subnetwork(net, [7])


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000))
def test_structural_invariants_on_random_networks(seed):
    net = random_network(random.Random(seed))
    rep = structural_report(net)
    inc = incidence_matrix(net)
    oracle = sympy.Matrix([[int(v) for v in row] for row in inc.tolist()]).rank()
    assert rep.n - rep.ell == rank(inc) == oracle
    assert deficiency(net) == rep.deficiency >= 0
    assert rep.t >= rep.ell
    lcs = linkage_classes(net)
    slcs = strong_linkage_classes(net)
    by_lc = [sum(1 for s in slcs if set(s) <= set(lc)) for lc in lcs]
    assert rep.weakly_reversible == all(k == 1 for k in by_lc)
    assert rep.cycle_terminal == (len(net.reactant_complexes) == net.n)
    w = conservation_witness(net)
    if w is not None:
        assert all(v >= 1 for v in w)
        assert all(sum(a * b for a, b in zip(w, col)) == 0 for col in stoichiometric_matrix(net).T.entries)
