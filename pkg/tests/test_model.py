import json

import pytest

from kirchberg.graphs import INF, cuntz_graph
from kirchberg.model import (FinitePath, HybridModel, ModelError, TruncatedInfinitePath, concat,
                             is_prefix, join, load_model, path_from_data, path_to_data, residual)

E0, E1 = (0, 0), (0, 1)


def test_chain_shape(pair_model):
    m = pair_model
    assert len(m.vertices()) == 4 and len(m.a_vertices) == 2
    assert set(m.d_exits(m.u[0])) == {"alpha0", "epsilon0"}
    a0 = m.a_vertices[0]
    assert m.d_exits(a0) == ["beta0", "gamma0", "delta0"]
    assert m.d_edge_path("beta0").terminus == a0


def test_single_block_chain(linf):
    m = HybridModel([[linf, linf]], 2)
    assert m.d_edges["alpha0"].origin == m.d_edges["alpha0"].target == m.u[0]


def test_block_squares_commute(pair_model):
    m, u = pair_model, pair_model.u[0]
    p = m.path(u, [(0, E0), (1, E1)])
    q = m.path(u, [(1, E1), (0, E0)])
    assert p == q and m.length(p) == (1, 1) and len(p.elements) == 1


def test_d_edges_have_full_length(pair_model):
    m = pair_model
    assert m.length(m.d_edge_path("alpha0")) == (1, 1)
    p = m.path(m.u[0], ["epsilon0", "beta0", "delta0", (0, E1)])
    assert m.length(p) == (4, 3)


def test_residual_and_prefix(pair_model):
    m, u = pair_model, pair_model.u[0]
    mu = m.path(u, [(0, E0)])
    nu = m.path(u, [(0, E0), (1, E1), "alpha0"])
    r = residual(mu, nu)
    assert r is not None and concat(mu, r) == nu
    assert is_prefix(mu, nu) and not is_prefix(nu, mu)
    assert residual(m.path(u, [(0, E1)]), nu) is None


def test_join_of_coordinates(pair_model):
    m, u = pair_model, pair_model.u[0]
    a = m.path(u, [(0, E0)])
    b = m.path(u, [(1, E1)])
    assert join(a, b) == m.path(u, [(0, E0), (1, E1)])
    assert join(a, m.path(u, [(0, E1)])) is None


def test_bad_paths_are_rejected(pair_model):
    m = pair_model
    with pytest.raises(ModelError):
        m.path(m.u[0], ["beta0"])


def test_factorization_through_prefix(pair_model):
    m, u = pair_model, pair_model.u[0]
    x = TruncatedInfinitePath(m.path(u, [(0, E0), (1, E1), "epsilon0"]), 2, 2)
    head, rest = m.factorize(FinitePath.vertex(u), x, m.path(u, [(1, E1)]))
    assert is_prefix(m.path(u, [(1, E1)]), head)
    assert concat(head, rest.path) == x.path


def test_blocks_need_an_infinite_emitter():
    with pytest.raises(ModelError):
        HybridModel([[cuntz_graph(3), cuntz_graph(INF)]], 2)


def test_path_data_round_trip(pair_model):
    m = pair_model
    p = m.path(m.u[0], [(0, E1), "epsilon0", "gamma0", "delta0"])
    assert path_from_data(m, json.loads(json.dumps(path_to_data(p)))) == p


def test_model_file(tmp_path, pair_model):
    f = tmp_path / "m.hyb"
    f.write_text(json.dumps(pair_model.to_data()))
    assert load_model(f).to_data() == pair_model.to_data()
    f.write_text('{"rank": 2,\n  "blocks": [}')
    with pytest.raises(ModelError, match=r"m.hyb:2:\d+"):
        load_model(f)
    f.write_text('{"rank": 2}')
    with pytest.raises(ModelError, match="malformed"):
        load_model(f)
