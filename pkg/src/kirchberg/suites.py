"""The acceptance suites.  Each returns a :class:`Report`; the CLI's
``verify`` verb and the test-suite both call them."""

from __future__ import annotations

import random
import time
from typing import Callable

from . import oracles
from .afcore import (Truncation, equivalence_check, inclusion_triangularity, o2_identity,
                     partition_check, thetas, toeplitz_core_basis, toeplitz_core_check)
from .algebra import AlgebraElement, HybridSystem, multiply_terms, reduce_star
from .cylinders import SetUnion, Vset, Zset, intersect, member_paths, required_depth, subtract, validate
from .designer import default_catalog, realize
from .graphs import INF, DirectedGraph, cuntz_graph
from .ktheory import FgAbelianGroup, GradedK, Z, ZERO, graph_k, kunneth, model_k
from .model import BlockElement, DElement, FinitePath, HybridModel, concat
from .reports import Report

DEFAULT_SEED = 20240601


def linf_pair_model() -> HybridModel:
    """Two blocks ``(Linf, Linf)`` joined by one connecting graph."""
    lin = cuntz_graph(INF)
    return HybridModel([[lin, lin], [lin, lin]], 2)


def mixed_model() -> HybridModel:
    """Blocks mixing ``Linf`` with a two-vertex graph that has a saturated vertex."""
    lin = cuntz_graph(INF)
    g = DirectedGraph.from_edges("G2", ["v", "w"], [("v", "w", "inf"), ("w", "v", 1)],
                                 distinguished="v")
    return HybridModel([[lin, g], [g, lin]], 2)


# 1 ---------------------------------------------------------------------------


def suite_kgraph(**_) -> Report:
    rep = Report("graph K-theory")
    t0 = time.perf_counter()
    for n in range(1, 9):
        got = graph_k(cuntz_graph(n + 1))
        rep.check(f"C{n + 1}", got == GradedK(FgAbelianGroup.from_cyclics(0, [n]), ZERO), got.pair())
    got = graph_k(cuntz_graph(INF))
    rep.check("Linf", got == GradedK(Z, ZERO), got.pair())
    got = graph_k(cuntz_graph(2))
    rep.check("C2 trivial", got == GradedK(), got.pair())
    dt = time.perf_counter() - t0
    rep.check("under one second", dt < 1.0, f"{dt:.2f}s")
    return rep


# 2 ---------------------------------------------------------------------------


def random_group(rng: random.Random) -> FgAbelianGroup:
    return FgAbelianGroup.from_cyclics(rng.randint(0, 3),
                                       [rng.randint(2, 12) for _ in range(rng.randint(0, 3))])


def random_graded(rng: random.Random) -> GradedK:
    return GradedK(random_group(rng), random_group(rng))


def suite_kunneth(seed: int = DEFAULT_SEED, cases: int = 1000, **_) -> Report:
    rng = random.Random(seed)
    rep = Report("Kunneth algebra")
    t0 = time.perf_counter()
    unit = GradedK(Z, ZERO)
    for _ in range(cases):
        a, b, c = random_graded(rng), random_graded(rng), random_graded(rng)
        rep.check("unit", kunneth(unit, a) == a and kunneth(a, unit) == a, a.pair())
        rep.check("commutative", kunneth(a, b) == kunneth(b, a), f"{a.pair()} {b.pair()}")
        rep.check("associative", kunneth(kunneth(a, b), c) == kunneth(a, kunneth(b, c)),
                  f"{a.pair()} {b.pair()} {c.pair()}")
    z = FgAbelianGroup.from_cyclics
    rep.check("Z/4 x Z/6", kunneth(GradedK(z(0, [4])), GradedK(z(0, [6])))
              == GradedK(z(0, [2]), z(0, [2])))
    rep.check("Z/2 x (0, Z)", kunneth(GradedK(z(0, [2])), GradedK(ZERO, Z)) == GradedK(ZERO, z(0, [2])))
    dt = time.perf_counter() - t0
    rep.check("under five seconds", dt < 5.0, f"{dt:.2f}s")
    rep.details["cases"] = cases
    return rep


# 3 ---------------------------------------------------------------------------

PIPELINE_REQUESTS = [
    "(Z, 0)",
    "(0, Z/3)",
    "(Z/5, 0); (Z, 0)",
    "(Z/6, Z/6)",
    "(Z/4, 0); (0, Z/2); (0, Z)",
    "(Z/2, 0); (Z/3, 0); (0, Z)",
]


def _orders(g: FgAbelianGroup) -> list[int]:
    return g.cyclic_orders()


def suite_pipeline(**_) -> Report:
    from .designer import parse_request

    rep = Report("block-sum pipeline")
    catalog = {e.name: e for e in default_catalog()}
    torsion_k1 = False
    for text in PIPELINE_REQUESTS:
        design = realize(parse_request(text), 2)
        got = model_k(design.model, design.annotations)
        fold = oracles.hand_fold([[(_orders(catalog[n].k.k0), _orders(catalog[n].k.k1)) for n in names]
                                  for names in design.factorization])
        mine = (oracles.primary_parts(_orders(got.k0)), oracles.primary_parts(_orders(got.k1)))
        rep.check(f"model {text}", mine == fold, f"{got.pair()} vs {fold}")
        torsion_k1 |= bool(got.k1.invariant_factors)
        rep.details[text] = {"factorization": design.factorization, "k": got.pair()}
    rep.check("torsion in K1 exercised", torsion_k1)
    return rep


# 4 ---------------------------------------------------------------------------


def suite_partition(model: HybridModel | None = None, levels=(1, 2), cap: int = 2, **_) -> Report:
    m = model or linf_pair_model()
    rep = Report("theta decomposition")
    t0 = time.perf_counter()
    for k in levels:
        tr = Truncation(m, k, cap)
        ths = thetas(tr)
        rep.merge(partition_check(tr, ths), f"k={k}: ")
        rep.merge(equivalence_check(tr, ths), f"k={k} classes: ")
    dt = time.perf_counter() - t0
    rep.check("under sixty seconds", dt < 60, f"{dt:.1f}s")
    return rep


# 5 ---------------------------------------------------------------------------


def _walk(m: HybridModel, rng: random.Random, p: FinitePath, n: int, cap: int) -> FinitePath:
    return concat(p, oracles.random_path(m, rng, p.terminus, n, cap))


def _random_set(m: HybridModel, rng: random.Random, stem: FinitePath, cap: int):
    t = stem.terminus
    if rng.random() < 0.5 or m.is_a_vertex(t):
        return Zset(stem)
    blocked = []
    for c in range(m.rank):
        g = m.blocks[t.block][c]
        if g.is_infinite_emitter(t.coords[c]) and rng.random() < 0.6:
            es = m.coordinate_edges(t, c, cap)
            blocked.append(rng.sample(es, rng.randint(1, len(es))))
        else:
            blocked.append([])
    return Vset(m, stem, blocked)


def suite_ring(model: HybridModel | None = None, seed: int = DEFAULT_SEED, cases: int = 500,
               cap: int = 2, **_) -> Report:
    m = model or mixed_model()
    rng = random.Random(seed)
    rep = Report("ring of cylinder sets")
    for _ in range(cases):
        o = rng.choice(m.vertices())
        s1 = _walk(m, rng, FinitePath.vertex(o), rng.randint(0, 2), cap)
        if rng.random() < 0.3:
            s2 = _walk(m, rng, s1, 1, cap)
        else:
            s2 = _walk(m, rng, FinitePath.vertex(o), rng.randint(0, 3), cap)
        a, b = _random_set(m, rng, s1, cap), _random_set(m, rng, s2, cap)
        inter, diff = intersect(m, a, b), subtract(m, a, b)
        label = f"{a.label(m)} / {b.label(m)}"
        for part in list(inter) + list(diff):
            validate(m, part)
        depth = max([max(max(m.length(x.stem)) for x in (a, b)) + 2]
                    + [required_depth(m, x) for x in list(inter) + list(diff)])
        ma = member_paths(m, [a], depth, cap)
        mb = member_paths(m, [b], depth, cap)
        for name, union, want in (("intersect", inter, ma & mb), ("subtract", diff, ma - mb)):
            pieces = [member_paths(m, [p], depth, cap) for p in union]
            rep.check(f"{name} agrees with oracle", set().union(*pieces) == want, label)
            rep.check(f"{name} parts disjoint", sum(map(len, pieces)) == len(set().union(*pieces)), label)
        SetUnion(m, inter.parts)
        SetUnion(m, diff.parts)
    rep.details["cases"] = cases
    return rep


# 6 ---------------------------------------------------------------------------


def suite_reducer(model: HybridModel | None = None, seed: int = DEFAULT_SEED, cases: int = 500,
                  cap: int = 2, bound: int = 2, **_) -> Report:
    m = model or mixed_model()
    s = HybridSystem(m)
    rng = random.Random(seed)
    rep = Report("star reducer")
    kinds: dict = {}
    vs = m.vertices()
    pool = [q for w in vs for q in m.paths_from(w, (1, 1), cap)]
    by_end: dict = {}
    for q in pool:
        by_end.setdefault(q.terminus, []).append(q)
    pairs = [(a, b) for qs in by_end.values() for a in qs for b in qs]
    by_origin: dict = {}
    for a, b in pairs:
        by_origin.setdefault(a.origin, []).append((a, b))
    for _ in range(cases):
        v = rng.choice(vs)
        p = oracles.random_path(m, rng, v, rng.randint(0, 2), cap)
        nu = concat(p, oracles.random_path(m, rng, p.terminus, rng.randint(0, 2), cap))
        sigma = concat(p, oracles.random_path(m, rng, p.terminus, rng.randint(0, 2), cap))
        r = reduce_star(m, nu, sigma)
        kinds[r.kind if r else "zero"] = kinds.get(r.kind if r else "zero", 0) + 1
        bad = oracles.star_map_mismatches(m, nu, sigma, r, bound, cap + 1)
        rep.check("star matches path maps", not bad, f"{m.path_label(nu)} * {m.path_label(sigma)}: {bad[:1]}")
        # composition of two spanning terms drawn from the pool
        mu, nu2 = rng.choice(pairs)
        sig2, tau = rng.choice(by_origin[nu2.origin])
        prod = multiply_terms(s, (mu, nu2), (sig2, tau))
        bad = oracles.product_map_mismatches(m, (mu, nu2), (sig2, tau), prod, bound, cap + 1)
        rep.check("products match composed bisections", not bad,
                  f"{m.path_label(mu)}, {m.path_label(nu2)} . {m.path_label(sig2)}, {m.path_label(tau)}")
    rep.details.update({"cases": cases, "cases_by_kind": dict(sorted(kinds.items()))})
    return rep


# 7 ---------------------------------------------------------------------------


def suite_toeplitz(seed: int = DEFAULT_SEED, cases: int = 20, max_k: int = 3, **_) -> Report:
    rng = random.Random(seed)
    rep = Report("Toeplitz cores")
    c2 = cuntz_graph(2)
    rep.check("C2 with empty relation set has three minimal projections",
              len(toeplitz_core_basis(c2, (), 1)) == 3)
    full = toeplitz_core_basis(c2, {"v"}, 2)
    rep.check("relations everywhere leave only terminal projections",
              all(b.label[0] == 2 for b in full) and len(full) == 4)
    sizes = []
    for i in range(cases):
        g, ck = oracles.random_graph(rng, name=f"R{i}")
        for k in range(1, max_k + 1):
            r = toeplitz_core_check(g, ck, k)
            rep.merge(r, "")
            sizes.append(r.details["size"])
    rep.details.update({"graphs": cases, "largest_basis": max(sizes)})
    return rep


# 8 ---------------------------------------------------------------------------


def suite_triangularity(model: HybridModel | None = None, levels=(1, 2), cap: int = 2, **_) -> Report:
    m = model or linf_pair_model()
    rep = Report("inclusion triangularity")
    for k in levels:
        r = inclusion_triangularity(Truncation(m, k, cap))
        rep.merge(r, f"k={k}: ")
    return rep


# 9 ---------------------------------------------------------------------------


def suite_o2(model: HybridModel | None = None, max_m: int = 3, **_) -> Report:
    m = model or linf_pair_model()
    rep = Report("O2 identity")
    for n in range(max_m + 1):
        rep.merge(o2_identity(m, n), f"m={n}: ")
    return rep


# 10 --------------------------------------------------------------------------


def suite_relations(model: HybridModel | None = None, cap: int = 2, **_) -> Report:
    """Generator relations of the universal algebra, over every level-one generator."""
    m = model or linf_pair_model()
    s = HybridSystem(m)
    rep = Report("defining relations")
    P = {x: AlgebraElement.projection(s, x) for x in m.vertices()}

    def gen(step: FinitePath) -> AlgebraElement:
        return AlgebraElement.term(s, step, FinitePath.vertex(step.terminus))

    count = 0
    for x in m.vertices():
        p = P[x]
        rep.check("(i) projections", p * p == p and p.adjoint() == p)
        steps = m.steps(x, cap)
        d_steps = [q for q in steps if isinstance(q.elements[0], DElement)]
        b_steps = [q for q in steps if isinstance(q.elements[0], BlockElement)]
        for q in steps:
            sq = gen(q)
            count += 1
            rep.check("(i) partial isometries", sq * sq.adjoint() * sq == sq)
            rep.check("source projections", sq.adjoint() * sq == P[q.terminus])
            rep.check("range under origin", P[x] * sq == sq)
        for dq in d_steps:
            for bq in b_steps:
                rep.check("(iv) D against block", (gen(dq).adjoint() * gen(bq)).is_zero)
        # Cuntz-Krieger / Toeplitz families per coordinate and for D
        families = [("(iii) D", d_steps, m.is_a_vertex(x))]
        if x.block >= 0:
            for c, tag in ((1, "(ii)"), (0, "(ii')")):
                fam = [m.block_step(x, c, e) for e in m.coordinate_edges(x, c, cap)]
                families.append((f"{tag} coordinate {c}", fam, m.coordinate_regular(x, c)))
        for tag, fam, exhaustive in families:
            total = AlgebraElement.zero(s)
            for i, q in enumerate(fam):
                for q2 in fam[i + 1:]:
                    rep.check(f"{tag} orthogonal ranges", (gen(q).adjoint() * gen(q2)).is_zero)
                total = total + gen(q) * gen(q).adjoint()
            if exhaustive:
                rep.check(f"{tag} exhaustion", total == p)
            else:
                rep.check(f"{tag} domination", p * total == total and total * total == total)
        # 2-graph commuting squares
        if x.block >= 0:
            for e in m.coordinate_edges(x, 0, cap):
                for f in m.coordinate_edges(x, 1, cap):
                    s_e_first = m.block_step(x, 0, e)
                    s_f_first = m.block_step(x, 1, f)
                    f_after = m.block_step(s_e_first.terminus, 1, f)
                    e_after = m.block_step(s_f_first.terminus, 0, e)
                    lhs = gen(s_f_first) * gen(e_after)
                    rhs = gen(s_e_first) * gen(f_after)
                    rep.check("(v) commuting square", lhs == rhs and not lhs.is_zero)
                    lhs2 = gen(f_after) * gen(e_after).adjoint()
                    rhs2 = gen(s_e_first).adjoint() * gen(s_f_first)
                    rep.check("(v) mixed identity", lhs2 == rhs2 and not lhs2.is_zero)
    for x in m.vertices():
        for y in m.vertices():
            if x != y:
                rep.check("(i) vertex projections orthogonal", (P[x] * P[y]).is_zero)
    rep.details["generators"] = count
    return rep


MODEL_SUITES = {"partition", "ring", "reducer", "triangularity", "o2", "relations"}

SUITES: dict[str, tuple[int, Callable[..., Report]]] = {
    "kgraph": (1, suite_kgraph),
    "kunneth": (2, suite_kunneth),
    "pipeline": (3, suite_pipeline),
    "partition": (4, suite_partition),
    "ring": (5, suite_ring),
    "reducer": (6, suite_reducer),
    "toeplitz": (7, suite_toeplitz),
    "triangularity": (8, suite_triangularity),
    "o2": (9, suite_o2),
    "relations": (10, suite_relations),
}


def run_suite(name: str, **opts) -> Report:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name][1](**opts)
