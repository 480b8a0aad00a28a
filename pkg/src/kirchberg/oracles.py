"""Independent checks and random generators shared by the test suites.

Nothing here uses the normal form of :mod:`kirchberg.algebra`.  Products
are checked against partial bijections of paths, and degree-zero elements
are represented as integer matrices over the atoms of a finite truncation
of the path space.
"""

from __future__ import annotations

import random
from typing import Iterable

from .cylinders import BasicSet, Vset, Zset, truncation_atoms
from .graphs import DirectedGraph, EdgeBundle, GraphPath
from .model import (BlockElement, FinitePath, HybridModel, TruncatedInfinitePath, concat,
                    residual)


class OracleMismatch(AssertionError):
    pass


# -- random generators --------------------------------------------------------


def random_path(model: HybridModel, rng: random.Random, start, steps: int, cap: int) -> FinitePath:
    """A random walk of at most ``steps`` single edges (indices below ``cap``)."""
    p = FinitePath.vertex(start)
    for _ in range(steps):
        opts = model.steps(p.terminus, cap)
        if not opts:
            break
        p = concat(p, rng.choice(opts))
    return p


def random_basic_set(model: HybridModel, rng: random.Random, start, steps: int, cap: int) -> BasicSet:
    stem = random_path(model, rng, start, steps, cap)
    t = stem.terminus
    if t.block < 0 or rng.random() < 0.5:
        return Zset(stem)
    blocked = []
    for c, g in enumerate(model.blocks[t.block]):
        y = t.coords[c]
        if g.is_infinite_emitter(y):
            es = g.out_edges(y, cap)
            blocked.append(frozenset(e for e in es if rng.random() < 0.5))
        else:
            blocked.append(frozenset())
    return Vset(model, stem, blocked)


def random_graph(rng: random.Random, max_vertices: int = 4, max_edges: int = 8,
                 name: str = "R") -> tuple[DirectedGraph, frozenset]:
    """A random finite graph and a random set of its regular vertices."""
    n = rng.randint(1, max_vertices)
    vs = tuple(f"v{i}" for i in range(n))
    m = rng.randint(1, max_edges)
    counts: dict = {}
    for _ in range(m):
        key = (rng.choice(vs), rng.choice(vs))
        counts[key] = counts.get(key, 0) + 1
    bundles = tuple(EdgeBundle(a, b, c) for (a, b), c in sorted(counts.items()))
    g = DirectedGraph(name, vs, bundles)
    ck = frozenset(v for v in g.regular_vertices if rng.random() < 0.5)
    return g, ck


# -- partial bijections of finite paths ---------------------------------------


def _act_adjoint(nu: FinitePath, x: FinitePath) -> FinitePath | None:
    """``S_nu^*`` on a path: strip the prefix ``nu``."""
    return residual(nu, x)


def _act_term(mu: FinitePath, nu: FinitePath, x: FinitePath) -> FinitePath | None:
    r = residual(nu, x)
    return None if r is None else concat(mu, r)


def star_map_mismatches(model: HybridModel, nu: FinitePath, sigma: FinitePath,
                        reduced, bound: int, cap: int) -> list[str]:
    """Compare ``S_nu^* S_sigma`` with a reduced form on every short path from ``t(sigma)``.

    The left side is computed through the factorization of ``sigma x``
    across the join of ``sigma`` and ``nu``.
    """
    bad = []
    if nu.origin != sigma.origin:
        return [] if reduced is None else ["different origins must give zero"]
    for x in model.paths_from(sigma.terminus, (bound,) * model.rank, cap):
        full = concat(sigma, x)
        lhs = None
        if residual(nu, full) is not None:
            tx = TruncatedInfinitePath(x, bound, cap)
            j, rest = model.factorize(sigma, tx, nu)
            lhs = concat(residual(nu, j), rest.path)
        rhs = None if reduced is None else _act_term(reduced.a, reduced.b, x)
        if lhs != rhs:
            bad.append(f"at {model.path_label(x)}: expected "
                       f"{None if lhs is None else model.path_label(lhs)}, got "
                       f"{None if rhs is None else model.path_label(rhs)}")
    return bad


def product_map_mismatches(model: HybridModel, t1: tuple, t2: tuple, prod,
                           bound: int, cap: int) -> list[str]:
    """Compare the product of two spanning terms with a claimed single term."""
    mu, nu = t1
    sigma, tau = t2
    bad = []
    for x in model.paths_from(tau.origin, (bound,) * model.rank, cap):
        y = _act_adjoint(tau, x)
        lhs = None
        if y is not None:
            z = _act_adjoint(nu, concat(sigma, y))
            if z is not None:
                lhs = concat(mu, z)
        rhs = None if prod is None else _act_term(prod[0], prod[1], x)
        if lhs != rhs:
            bad.append(f"at {model.path_label(x)}")
    return bad


# -- degree-zero elements as atom matrices -----------------------------------


class AtomSpace:
    """Nonempty atoms of the truncation at ``depth`` with edge indices below ``cap``."""

    def __init__(self, model: HybridModel, depth: int, cap: int):
        self.model, self.depth, self.cap = model, depth, cap
        self.atoms: list[FinitePath] = []
        for v in model.vertices():
            self.atoms += truncation_atoms(model, v, depth, cap)
        self.index = {a: i for i, a in enumerate(self.atoms)}

    def _fits(self, p: FinitePath) -> bool:
        if max(self.model.length(p), default=0) > self.depth:
            return False
        for el in p.elements:
            if isinstance(el, BlockElement):
                if any(e[1] >= self.cap for q in el.paths for e in q.edges):
                    return False
        return True

    def term_matrix(self, mu: FinitePath, nu: FinitePath) -> dict:
        m = self.model
        if m.length(mu) != m.length(nu):
            raise OracleMismatch("atom matrices represent degree-zero terms only")
        if not (self._fits(mu) and self._fits(nu)):
            raise OracleMismatch("term is not visible at this truncation")
        out = {}
        for rho in self.atoms:
            r = residual(nu, rho)
            if r is None:
                continue
            img = concat(mu, r)
            if img not in self.index:
                raise OracleMismatch(f"{m.path_label(img)} is not an atom")
            out[(self.index[img], self.index[rho])] = 1
        return out

    def matrix(self, terms: Iterable) -> dict:
        """``terms`` is an iterable of ``((mu, nu), coeff)``."""
        acc: dict = {}
        for (mu, nu), c in terms:
            for k, v in self.term_matrix(mu, nu).items():
                acc[k] = acc.get(k, 0) + c * v
        return {k: v for k, v in acc.items() if v}

    def of(self, element) -> dict:
        return self.matrix(element.terms.items())


def matmul(a: dict, b: dict) -> dict:
    rows: dict = {}
    for (i, j), v in b.items():
        rows.setdefault(i, []).append((j, v))
    out: dict = {}
    for (i, k), u in a.items():
        for j, v in rows.get(k, ()):
            out[(i, j)] = out.get((i, j), 0) + u * v
    return {k: v for k, v in out.items() if v}


# -- graph systems: partial maps on finite graph paths ------------------------


def graph_paths(g: DirectedGraph, max_len: int) -> list[GraphPath]:
    out = []
    frontier = [GraphPath.vertex(v) for v in g.vertices]
    for _ in range(max_len + 1):
        out += frontier
        nxt = []
        for p in frontier:
            for e in g.out_edges(p.terminus):
                nxt.append(p.extend(g, e))
        frontier = nxt
    return out


class GraphAtomSpace:
    """Boundary atoms for a relative Toeplitz graph algebra ``TO(E, S)``.

    An atom is a path of length ``depth`` or a shorter path ending outside
    ``S`` (where a path may stop); degree-zero terms act on them by prefix
    replacement.
    """

    def __init__(self, g: DirectedGraph, ck: frozenset, depth: int):
        self.g, self.ck, self.depth = g, ck, depth
        self.atoms = [p for p in graph_paths(g, depth)
                      if len(p) == depth or p.terminus not in ck]
        self.index = {a: i for i, a in enumerate(self.atoms)}

    def matrix(self, terms: Iterable) -> dict:
        acc: dict = {}
        for (mu, nu), c in terms:
            if len(mu) != len(nu) or len(mu) > self.depth:
                raise OracleMismatch("term not representable at this depth")
            for rho in self.atoms:
                if not nu.is_prefix_of(rho):
                    continue
                img = mu.concat(rho.drop_prefix(nu))
                k = (self.index[img], self.index[rho])
                acc[k] = acc.get(k, 0) + c
        return {k: v for k, v in acc.items() if v}

    def of(self, element) -> dict:
        return self.matrix(element.terms.items())


# -- K-theory by prime-power bookkeeping ---------------------------------------


def primary_parts(orders: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    """``(free rank, sorted prime powers)`` of a sum of cyclic groups (0 meaning Z)."""
    from sympy import factorint

    free, pp = 0, []
    for n in orders:
        if n == 0:
            free += 1
        elif n > 1:
            pp += [p ** e for p, e in factorint(n).items()]
    return free, tuple(sorted(pp))


def _cyclic_product(a: int, b: int) -> tuple[list, list]:
    """Tensor and Tor of two cyclic groups given by prime power or 0 orders."""
    from math import gcd

    if a == 0 and b == 0:
        return [0], []
    if a == 0 or b == 0:
        return [a or b], []
    g = gcd(a, b)
    return [g], [g]


def hand_fold(blocks: Iterable[Iterable[tuple[list, list]]]) -> tuple[tuple, tuple]:
    """K-theory of a direct sum of tensor products, each graph given by its
    ``(K0 cyclic orders, K1 cyclic orders)``.  Returns primary parts of K0, K1."""
    k0_all, k1_all = [], []
    for block in blocks:
        cur = ([0], [])
        for g0, g1 in block:
            g0 = [p for n in g0 for p in _split(n)]
            g1 = [p for n in g1 for p in _split(n)]
            n0, n1 = [], []
            for deg_a, xs in ((0, cur[0]), (1, cur[1])):
                for deg_b, ys in ((0, g0), (1, g1)):
                    for x in xs:
                        for y in ys:
                            ten, tor = _cyclic_product(x, y)
                            tgt_ten = n0 if (deg_a + deg_b) % 2 == 0 else n1
                            tgt_tor = n1 if (deg_a + deg_b) % 2 == 0 else n0
                            tgt_ten += ten
                            tgt_tor += tor
            cur = (n0, n1)
        k0_all += cur[0]
        k1_all += cur[1]
    return primary_parts(k0_all), primary_parts(k1_all)


def _split(n: int) -> list[int]:
    return [0] if n == 0 else list(primary_parts([n])[1])
