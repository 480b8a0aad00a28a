import random

from kirchberg.algebra import AlgebraElement, GraphSystem
from kirchberg.graphs import GraphPath, cuntz_graph
from kirchberg.oracles import (AtomSpace, GraphAtomSpace, hand_fold, matmul, primary_parts,
                               random_graph)


def test_primary_parts():
    assert primary_parts([0, 12, 1, 9]) == (1, (3, 4, 9))


def test_hand_fold_known_products():
    # (Z/4, 0) x (Z/6, 0) = (Z/2, Z/2)
    assert hand_fold([[([4], []), ([6], [])]]) == ((0, (2,)), (0, (2,)))
    # a direct sum of two blocks
    assert hand_fold([[([0], []), ([0], [])], [([5], []), ([0], [])]]) == ((1, (5,)), (0, ()))


def test_atoms_are_a_partition(pair_model):
    space = AtomSpace(pair_model, 2, 2)
    ident = {(i, i): 1 for i in range(len(space.atoms))}
    total = {}
    for v in pair_model.vertices():
        for k, x in space.term_matrix(*(2 * [pair_model.path(v, [])])).items():
            total[k] = total.get(k, 0) + x
    assert total == ident


def test_graph_atoms_respect_relations():
    g = cuntz_graph(2)
    s = GraphSystem(g, {"v"})
    space = GraphAtomSpace(g, frozenset({"v"}), 2)
    e = GraphPath.of(g, "v", [g.out_edges("v")[0]])
    x = AlgebraElement.range_projection(s, e)
    assert matmul(space.of(x), space.of(x)) == space.of(x)


def test_random_graphs_keep_relations_on_regular_vertices():
    rng = random.Random(1)
    for _ in range(30):
        g, ck = random_graph(rng)
        assert ck <= set(g.regular_vertices)
