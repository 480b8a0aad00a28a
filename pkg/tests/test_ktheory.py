import pytest
from hypothesis import given, settings, strategies as st

from kirchberg.graphs import INF, DirectedGraph, cuntz_graph
from kirchberg.ktheory import (FgAbelianGroup, GradedK, KAnnotation, KTheoryError, Z, ZERO,
                               graph_k, kunneth, kunneth_all, model_k, smith_normal_form)
from kirchberg.oracles import hand_fold, primary_parts

groups = st.builds(FgAbelianGroup.from_cyclics, st.integers(0, 3),
                   st.lists(st.integers(2, 12), max_size=3))
graded = st.builds(GradedK, groups, groups)


def test_smith_normal_form():
    from sympy import Matrix
    m = Matrix([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    d, u, v = smith_normal_form(m)
    assert u * m * v == d
    assert [d[i, i] for i in range(3)] == [2, 6, 12]


def test_canonical_form():
    g = FgAbelianGroup.from_cyclics(1, [4, 6, 9, 0, 1])
    assert g.free_rank == 2 and g.invariant_factors == (6, 36)
    assert g.render() == "Z^2 (+) Z/6 (+) Z/36"
    assert FgAbelianGroup.parse(g.render()) == g


def test_parse_errors():
    with pytest.raises(KTheoryError):
        FgAbelianGroup.parse("Z/")
    with pytest.raises(KTheoryError):
        GradedK.parse("(Z, Z")


@pytest.mark.parametrize("n", range(1, 9))
def test_cuntz(n):
    assert graph_k(cuntz_graph(n + 1)) == GradedK(FgAbelianGroup.from_cyclics(0, [n]), ZERO)


def test_graph_with_sink_and_emitter():
    g = DirectedGraph.from_edges("M", ["a", "b", "c"],
                                 [("a", "a", 2), ("a", "b", 1), ("b", "b", "inf"), ("b", "c", 1)])
    # singular b, c contribute free K0; a's loop count 2 leaves no torsion
    assert graph_k(g) == GradedK(FgAbelianGroup(2), ZERO)
    assert graph_k(cuntz_graph(1)) == GradedK(Z, Z)


def test_fixed_products():
    z = FgAbelianGroup.from_cyclics
    assert kunneth(GradedK(z(0, [4])), GradedK(z(0, [6]))) == GradedK(z(0, [2]), z(0, [2]))
    assert kunneth(GradedK(z(0, [2])), GradedK(ZERO, Z)) == GradedK(ZERO, z(0, [2]))


@settings(max_examples=150, deadline=None)
@given(graded, graded, graded)
def test_kunneth_laws(a, b, c):
    assert kunneth(GradedK(Z, ZERO), a) == a
    assert kunneth(a, b) == kunneth(b, a)
    assert kunneth(kunneth(a, b), c) == kunneth(a, kunneth(b, c))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.lists(st.integers(0, 12), max_size=3),
                          st.lists(st.integers(0, 12), max_size=3)), min_size=1, max_size=3))
def test_kunneth_matches_prime_power_fold(block):
    ks = [GradedK(FgAbelianGroup.from_cyclics(0, a), FgAbelianGroup.from_cyclics(0, b))
          for a, b in block]
    got = kunneth_all(ks)
    want = hand_fold([[(a, b) for a, b in block]])
    assert (primary_parts(got.k0.cyclic_orders()), primary_parts(got.k1.cyclic_orders())) == want


def test_model_k_needs_annotations(pair_model):
    from kirchberg.designer import window_graph
    from kirchberg.model import HybridModel
    assert model_k(pair_model) == GradedK(FgAbelianGroup(2), ZERO)
    w = window_graph("T3")
    m = HybridModel([[w, cuntz_graph(INF)]], 2)
    with pytest.raises(KTheoryError):
        model_k(m)
    ann = KAnnotation("T3", GradedK(FgAbelianGroup.from_cyclics(0, [3])), "cited")
    assert model_k(m, [ann]) == GradedK(FgAbelianGroup.from_cyclics(0, [3]))


def test_contradicting_annotation_is_refused(pair_model):
    bad = KAnnotation("Linf", GradedK(ZERO, Z), "wrong")
    with pytest.raises(KTheoryError):
        model_k(pair_model, [bad])
