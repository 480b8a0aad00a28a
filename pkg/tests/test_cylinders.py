import random

import pytest

from kirchberg.cylinders import (CylinderError, SetUnion, Vset, Zset, intersect, member_paths,
                                 partition_expand, required_depth, subtract, validate)
from kirchberg.oracles import random_basic_set

E0, E1 = (0, 0), (0, 1)
CAP = 2


def members(m, sets, depth=4):
    return member_paths(m, sets, depth, CAP)


def test_nested_cylinders(pair_model):
    m, u = pair_model, pair_model.u[0]
    big, small = Zset(m.path(u, [(0, E0)])), Zset(m.path(u, [(0, E0), (1, E1)]))
    assert members(m, intersect(m, big, small)) == members(m, [small])
    assert not subtract(m, small, big).parts
    diff = subtract(m, big, small)
    assert members(m, diff) == members(m, [big]) - members(m, [small])


def test_disjoint_stems(pair_model):
    m, u = pair_model, pair_model.u[0]
    a, b = Zset(m.path(u, [(0, E0)])), Zset(m.path(u, [(0, E1)]))
    assert not intersect(m, a, b).parts
    assert members(m, subtract(m, a, b)) == members(m, [a])


def test_v_set_blocks_edges(pair_model):
    m, u = pair_model, pair_model.u[0]
    v = Vset(m, m.path(u, []), [[E0], []])
    got = members(m, [v])
    assert all(not (p.elements and m.path(u, [(0, E0)]) == p) for p in got)
    validate(m, v)


def test_v_set_needs_infinite_emitter(mixed):
    m = mixed
    w = next(x for x in m.vertices() if x.block == 0 and x.coords[1] == "w")
    with pytest.raises(CylinderError):
        validate(m, Vset(m, m.path(w, []), [[], [(0, 0)]]))


def test_partition_expand_is_a_partition(pair_model):
    m, u = pair_model, pair_model.u[0]
    a = Vset(m, m.path(u, []))
    parts = partition_expand(m, a, [[E0], [E1]])
    SetUnion(m, parts.parts)
    assert len(parts) > 1
    assert members(m, parts, 3) == members(m, [a], 3)
    z = Zset(m.path(u, []))
    split = partition_expand(m, z)
    assert len(split) == 1 + len(m.d_exits(u))
    assert members(m, split, 3) == members(m, [z], 3)


def test_overlapping_unions_are_rejected(pair_model):
    m, u = pair_model, pair_model.u[0]
    with pytest.raises(CylinderError):
        SetUnion(m, [Zset(m.path(u, [])), Zset(m.path(u, [(0, E0)]))])


def test_random_ring_operations(mixed):
    rng = random.Random(7)
    m = mixed
    for _ in range(40):
        o = rng.choice(m.vertices())
        a = random_basic_set(m, rng, o, rng.randint(0, 2), CAP)
        b = random_basic_set(m, rng, o, rng.randint(0, 2), CAP)
        inter, diff = intersect(m, a, b), subtract(m, a, b)
        depth = max([max(max(m.length(x.stem)) for x in (a, b)) + 2]
                    + [required_depth(m, x) for x in list(inter) + list(diff)])
        ma, mb = members(m, [a], depth), members(m, [b], depth)
        assert members(m, inter, depth) == ma & mb
        assert members(m, diff, depth) == ma - mb
