import pytest

from kirchberg.afcore import (AfCoreError, Truncation, bratteli, census, equivalence_check,
                              inclusion_triangularity, o2_identity, partition_check, theta, thetas,
                              toeplitz_core_basis, toeplitz_core_check, unit)
from kirchberg.algebra import AlgebraElement
from kirchberg.graphs import DirectedGraph, cuntz_graph


@pytest.fixture(scope="module")
def level1(pair_model):
    return Truncation(pair_model, 1, 2)


def test_level_one_census(level1):
    ths = thetas(level1)
    assert len(ths) == 28
    assert census(ths) == {"kind1": 18, "kind2": 4, "kind3": 4, "kind4": 2}


def test_thetas_sum_to_unit(level1):
    ths = thetas(level1)
    total = sum((t.element for t in ths), AlgebraElement.zero(ths[0].element.system))
    assert total == unit(level1)


def test_partition_and_classes(level1):
    assert partition_check(level1).ok
    assert equivalence_check(level1).ok


def test_mixed_model_level_one(mixed):
    tr = Truncation(mixed, 1, 2)
    assert partition_check(tr).ok and equivalence_check(tr).ok


def test_theta_validation(level1, pair_model):
    m = pair_model
    with pytest.raises(AfCoreError):
        theta(level1, 5, m.path(m.u[0], []))


def test_truncation_requires_non_circuit_levels(pair_model):
    with pytest.raises(Exception):
        Truncation(pair_model, 1, 1)


def test_bratteli_conservation(pair_model):
    level, rep = bratteli(Truncation(pair_model, 1, 2), Truncation(pair_model, 2, 2))
    assert rep.ok
    dot = level.to_dot()
    assert dot.startswith("digraph") and "->" in dot


def test_triangularity(level1):
    rep = inclusion_triangularity(level1)
    assert rep.ok and rep.details["determinant"] == 1


@pytest.mark.parametrize("m", range(3))
def test_o2(pair_model, m):
    assert o2_identity(pair_model, m).ok


def test_toeplitz_counts():
    c2 = cuntz_graph(2)
    assert len(toeplitz_core_basis(c2, (), 1)) == 3
    assert len(toeplitz_core_basis(c2, (), 2)) == 1 + 2 + 4
    g = DirectedGraph.from_edges("P", ["a", "b"], [("a", "b", 2), ("b", "a", 1), ("b", "b", 1)])
    for k in (1, 2, 3):
        assert toeplitz_core_check(g, {"a"}, k).ok


def test_toeplitz_rejects_sinks_in_relation_set():
    g = DirectedGraph.from_edges("S", ["a", "b"], [("a", "b", 1)])
    with pytest.raises(AfCoreError):
        toeplitz_core_basis(g, {"b"}, 1)
