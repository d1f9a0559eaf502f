import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crnlp.kinetics import (
    KineticsError,
    PLKind,
    PolyPLKinetics,
    PowerLawKinetics,
    canonical_poly_representation,
    classify_plk,
    cycle_terminal_part,
    evaluate_complex_formation,
    evaluate_sfrf,
    is_complex_balanced,
    is_equilibrium,
    is_pl_tik,
    kinetic_deficiency,
    kinetic_flux_subspace,
    kinetic_order_subspace,
    kinetic_reactant_flux_subspace,
    kinetic_vector,
    pl_summands,
    sf_pairs,
    sfrf_jacobian,
    t_matrix,
)
from crnlp.linalg import Subspace
from crnlp.network import Network, stoichiometric_subspace

from helpers import example1, random_network, schmitz

AB = Network.from_reactions(["A", "B"], [("R1", {"A": 1}, {"B": 1}), ("R2", {"B": 1}, {"A": 1})])


def test_mass_action_is_rdk_and_example1_ndk():
    net = example1().network
    assert classify_plk(net, PowerLawKinetics.mass_action(net)) is PLKind.RDK
    rows = [[2, 0, 0, 0], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 3], [3, 0, 0, 0]]
    assert classify_plk(net, PowerLawKinetics.from_rows(rows)) is PLKind.NDK
    rows[4] = [2, 0, 0, 0]
    assert classify_plk(net, PowerLawKinetics.from_rows(rows)) is PLKind.RDK


def test_t_matrix_of_reversible_pair():
    k = PowerLawKinetics.mass_action(AB)
    tm = t_matrix(AB, k)
    assert tm.matrix.tolist() == [[1, 0], [0, 1]]
    assert tm.augmented.tolist() == [[1, 0], [0, 1], [1, 1]]
    assert is_pl_tik(AB, k)


def test_collapsed_kinetic_complexes():
    k = PowerLawKinetics.from_rows([[1, 0], [1, 0]])
    assert not is_pl_tik(AB, k)
    assert kinetic_order_subspace(AB, k).dim == 0
    assert kinetic_deficiency(AB, k) == 1


def test_mass_action_kinetic_subspaces_equal_stoichiometric():
    k = PowerLawKinetics.mass_action(AB)
    assert kinetic_order_subspace(AB, k) == stoichiometric_subspace(AB)
    assert kinetic_reactant_flux_subspace(AB, k) == Subspace.span([[-1, 1]], 2)
    assert kinetic_deficiency(AB, k) == 0


def test_schmitz_kinetic_order_subspaces():
    nf = schmitz()
    d = nf.decomposition()
    parts = [kinetic_order_subspace(s, nf.kinetics.restrict(b)) for s, b in zip(d.subnetworks, d.blocks)]
    assert [p.dim for p in parts] == [2, 3]
    total = Subspace.span([v for p in parts for v in p.vectors], 6)
    assert total.dim == 5
    with pytest.raises(KineticsError):
        kinetic_order_subspace(nf.network, nf.kinetics)  # PL-NDK


def test_non_cycle_terminal_network():
    chain = Network.from_reactions(["A", "B"], [("R1", {"A": 1}, {"B": 1})])
    k = PowerLawKinetics.mass_action(chain)
    assert cycle_terminal_part(chain) == ()
    assert kinetic_reactant_flux_subspace(chain, k).dim == 0
    assert kinetic_flux_subspace(chain, k).dim == 0
    with pytest.raises(KineticsError):
        kinetic_order_subspace(chain, k)


def test_cycle_terminal_part_drops_dangling_reactions():
    net = Network.from_reactions(["A", "B", "C"], [
        ("R1", {"A": 1}, {"B": 1}), ("R2", {"B": 1}, {"A": 1}), ("R3", {"B": 1}, {"C": 1}),
    ])
    assert cycle_terminal_part(net) == (0, 1)
    k = PowerLawKinetics.mass_action(net)
    assert kinetic_reactant_flux_subspace(net, k) == Subspace.span([[1, -1, 0]], 3)


def test_sf_pairs():
    net = Network.from_reactions(["A", "B", "C"], [
        ("R1", {"A": 1}, {"B": 1}), ("R2", {"B": 1}, {"C": 1}), ("R3", {"C": 1}, {"A": 1}),
    ])
    k = PowerLawKinetics.from_rows([[1, 2, 0], [1, 5, 0], [0, 0, 1]])
    pairs = sf_pairs(net, k)
    assert [(p.reactions, p.species) for p in pairs] == [((0, 1), 1)]
    assert pairs[0].same_linkage_class
    assert sf_pairs(net, PowerLawKinetics.from_rows([[1, 2, 0], [1, 2, 0], [0, 0, 1]])) == ()
    assert sf_pairs(net, PowerLawKinetics.from_rows([[1, 2, 0], [2, 5, 0], [0, 0, 1]])) == ()


def test_poly_pl_validation():
    with pytest.raises(KineticsError):
        PolyPLKinetics(1, (((-1, (1,)),),))
    with pytest.raises(KineticsError):
        PolyPLKinetics(1, (((0, (1,)),),))
    with pytest.raises(KineticsError):
        PolyPLKinetics(1, ((),))
    with pytest.raises(KineticsError):
        PolyPLKinetics(2, (((1, (1,)),),))


def test_canonical_padding_splits_last_term():
    k = PolyPLKinetics(2, (
        ((1, (1, 0)),),
        ((2, (0, 1)), (1, (1, 1)), (3, (2, 0))),
    ))
    c = canonical_poly_representation(k)
    assert c.term_counts == (3, 3)
    assert c.terms[0] == ((Fraction(1, 3), (1, 0)),) * 3
    assert canonical_poly_representation(c) == c


def test_rates_required_for_evaluation():
    k = PowerLawKinetics.mass_action(AB)
    with pytest.raises(KineticsError):
        evaluate_sfrf(AB, k, [1.0, 1.0])


def test_example1_sfrf_at_ones():
    net = example1().network
    k = PowerLawKinetics.mass_action(net, [1] * 5)
    assert evaluate_sfrf(net, k, [1, 1, 1, 1]).tolist() == [-4, 1, 2, 0]
    k3 = PowerLawKinetics.mass_action(net, [3] * 5)
    assert np.allclose(evaluate_sfrf(net, k3, [0.5, 2, 1, 1.5]), 3 * evaluate_sfrf(net, PowerLawKinetics.mass_action(net, [1] * 5), [0.5, 2, 1, 1.5]))


def test_equilibria_and_complex_balancing():
    k = PowerLawKinetics.mass_action(AB, [1, 1])
    assert evaluate_sfrf(AB, k, [1.0, 1.0]).tolist() == [0, 0]
    assert evaluate_complex_formation(AB, k, [1.0, 1.0]).tolist() == [0, 0]
    assert is_equilibrium(AB, k, [1.0, 1.0]) and is_complex_balanced(AB, k, [1.0, 1.0])
    chain = Network.from_reactions(["A", "B"], [("R1", {"A": 1}, {"B": 1})])
    kc = PowerLawKinetics.mass_action(chain, [1])
    assert not is_complex_balanced(chain, kc, [0.7, 0.2])


def test_complex_balanced_witness_of_zero_kinetic_deficiency_system():
    # weakly reversible triangle with power-law orders; solve for a complex balanced point numerically
    net = Network.from_reactions(["A", "B"], [
        ("R1", {"A": 1}, {"B": 1}), ("R2", {"B": 1}, {"A": 1, "B": 1}), ("R3", {"A": 1, "B": 1}, {"A": 1}),
    ])
    k = PowerLawKinetics.from_rows([["1/2", 0], [0, 2], [1, 1]], rates=[1, 2, 3])
    assert kinetic_deficiency(net, k) == 0
    import scipy.optimize

    res = scipy.optimize.least_squares(lambda u: evaluate_complex_formation(net, k, np.exp(u)), [0.0, 0.0],
                                       xtol=1e-15, ftol=1e-15, gtol=1e-15)
    assert is_complex_balanced(net, k, np.exp(res.x))


def test_jacobian_matches_finite_differences():
    net = example1().network
    k = PowerLawKinetics.from_rows([[2, 0, 0, 0], [0, "1/2", 1, 0], [0, 0, "3/2", 0], [0, 0, 0, 3], [2, 0, 0, 0]],
                                   rates=[1, 2, 3, 4, 5])
    x = np.array([0.7, 1.3, 0.9, 1.1])
    jac = sfrf_jacobian(net, k, x)
    h = 1e-6
    fd = np.column_stack([(evaluate_sfrf(net, k, x + h * e) - evaluate_sfrf(net, k, x - h * e)) / (2 * h)
                          for e in np.eye(4)])
    assert np.allclose(jac, fd, atol=1e-6)


poly_terms = st.lists(
    st.tuples(st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=4),
              st.tuples(st.integers(0, 3), st.integers(0, 3))),
    min_size=1, max_size=3, unique_by=lambda t: t[1],
)


@settings(max_examples=80, deadline=None)
@given(st.lists(poly_terms, min_size=1, max_size=4),
       st.tuples(st.fractions(min_value=Fraction(1, 5), max_value=5, max_denominator=5),
                 st.fractions(min_value=Fraction(1, 5), max_value=5, max_denominator=5)))
def test_padding_and_summands_preserve_values_exactly(terms, x):
    k = PolyPLKinetics(2, tuple(tuple(t) for t in terms), [1] * len(terms))
    c = canonical_poly_representation(k)
    assert c.is_canonical
    assert c.rate_values(x) == k.rate_values(x)
    summed = [sum(vals) for vals in zip(*(s.rate_values(x) for s in pl_summands(c)))]
    assert summed == k.rate_values(x)


def test_summands_need_canonical_form():
    k = PolyPLKinetics(1, (((1, (1,)),), ((1, (0,)), (1, (2,)))))
    with pytest.raises(KineticsError):
        pl_summands(k)
    single = PolyPLKinetics.from_power_law(PowerLawKinetics.from_rows([[1], [2]]))
    assert pl_summands(single)[0].orders.tolist() == [[1], [2]]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_rdk_subspace_invariants(seed):
    rng = random.Random(seed)
    net = random_network(rng)
    k = PowerLawKinetics.mass_action(net)
    assert classify_plk(net, k) is PLKind.RDK
    if len(net.reactant_complexes) == net.n:
        assert kinetic_reactant_flux_subspace(net, k) == kinetic_order_subspace(net, k)
        assert kinetic_order_subspace(net, k) == stoichiometric_subspace(net)
    for p in sf_pairs(net, k):
        i, j = p.reactions
        assert sum(a != b for a, b in zip(k.orders.row(i), k.orders.row(j))) == 1


def test_kinetic_vector_exact_at_rational_points():
    k = PowerLawKinetics.from_rows([[2, 0], [0, 1]], rates=[Fraction(1, 2), 3])
    assert kinetic_vector(AB, k, [Fraction(1, 2), Fraction(2, 3)]) == [Fraction(1, 8), Fraction(2)]
