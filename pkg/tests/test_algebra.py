import random

import pytest

from kirchberg.algebra import (AlgebraElement, AlgebraError, GraphSystem, HybridSystem,
                               apply_automorphism, generators, multiply_terms, reduce_star,
                               swap_automorphism)
from kirchberg.graphs import GraphPath, cuntz_graph
from kirchberg.model import FinitePath
from kirchberg.oracles import AtomSpace, matmul, product_map_mismatches, random_path, star_map_mismatches

E0, E1 = (0, 0), (0, 1)


@pytest.fixture
def sys_(pair_model):
    return HybridSystem(pair_model)


def test_reduce_star_cases(pair_model):
    m, u = pair_model, pair_model.u[0]
    e = m.path(u, [(0, E0)])
    f = m.path(u, [(1, E1)])
    assert reduce_star(m, e, e).kind == "projection"
    assert reduce_star(m, e, m.path(u, [(0, E1)])) is None
    mixed = reduce_star(m, e, f)
    assert mixed.kind == "mixed"
    assert m.length(mixed.a) == (0, 1) and m.length(mixed.b) == (1, 0)
    assert reduce_star(m, m.path(u, ["alpha0"]), e) is None


def test_star_against_path_maps(mixed):
    rng = random.Random(3)
    m = mixed
    for _ in range(60):
        v = rng.choice(m.vertices())
        p = random_path(m, rng, v, rng.randint(0, 2), 2)
        nu = random_path(m, rng, v, rng.randint(0, 3), 2)
        r = reduce_star(m, nu, p)
        assert not star_map_mismatches(m, nu, p, r, 2, 3)


def test_ck_relation_at_a_vertex(sys_, pair_model):
    m = pair_model
    a = m.a_vertices[0]
    total = AlgebraElement.zero(sys_)
    for n in m.d_exits(a):
        total = total + AlgebraElement.range_projection(sys_, m.d_edge_path(n))
    assert total == AlgebraElement.projection(sys_, a)


def test_normal_form_removes_special_edge(sys_, pair_model):
    m = pair_model
    beta = m.d_edge_path("beta0")
    x = AlgebraElement.range_projection(sys_, beta)
    assert all(beta not in key for key in x.terms)
    assert x * x == x and x.adjoint() == x


def test_products_and_adjoints_on_atoms(sys_, pair_model):
    m, u = pair_model, pair_model.u[0]
    space = AtomSpace(m, 3, 2)
    e, f = m.path(u, [(0, E0)]), m.path(u, [(0, E1)])
    x = AlgebraElement.term(sys_, e, f) + AlgebraElement.range_projection(sys_, m.d_edge_path("epsilon0"))
    y = AlgebraElement.term(sys_, f, e, coeff=2)
    assert space.of(x * y) == matmul(space.of(x), space.of(y))
    assert space.of(x.adjoint()) == {(j, i): v for (i, j), v in space.of(x).items()}


def test_multiply_terms_oracle(pair_model):
    m, u = pair_model, pair_model.u[0]
    s = HybridSystem(m)
    mu, nu = m.path(u, [(1, E0)]), m.path(u, [(0, E1)])
    sig, tau = m.path(u, [(0, E1), (1, E0)]), m.path(u, [(0, E0), (1, E0)])
    prod = multiply_terms(s, (mu, nu), (sig, tau))
    assert not product_map_mismatches(m, (mu, nu), (sig, tau), prod, 2, 3)


def test_generators_are_partial_isometries(sys_):
    gens, projs = generators(sys_, 2)
    for g in gens:
        assert g * g.adjoint() * g == g


def test_mixing_systems_is_an_error(sys_, mixed):
    other = HybridSystem(mixed)
    with pytest.raises(AlgebraError):
        AlgebraElement.projection(sys_, sys_.model.u[0]) * AlgebraElement.projection(other, mixed.u[0])


def test_serialization(sys_, pair_model):
    m = pair_model
    x = AlgebraElement.term(sys_, m.path(m.u[0], [(0, E0)]), m.path(m.u[0], [(0, E1)]), 3)
    assert AlgebraElement.from_data(sys_, x.to_data()) == x


def test_automorphism_preserves_products(sys_, pair_model):
    m, u = pair_model, pair_model.u[0]
    g = m.blocks[0][0]
    autos = {(0, 0): swap_automorphism(g, E0, E1)}
    x = AlgebraElement.term(sys_, m.path(u, [(0, E0)]), m.path(u, [(0, E0)]))
    y = AlgebraElement.term(sys_, m.path(u, [(0, E0)]), m.path(u, [(1, E1)]))
    assert apply_automorphism(x * y, autos) == apply_automorphism(x, autos) * apply_automorphism(y, autos)


def test_graph_system_toeplitz_vs_ck():
    g = cuntz_graph(2)
    e = [GraphPath.of(g, "v", [x]) for x in g.out_edges("v")]
    for ck, closes in (((), False), (("v",), True)):
        s = GraphSystem(g, ck)
        total = sum((AlgebraElement.range_projection(s, p) for p in e), AlgebraElement.zero(s))
        assert (total == AlgebraElement.projection(s, "v")) is closes
