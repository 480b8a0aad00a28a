"""Integer combinations of spanning terms ``S_mu S_nu^*`` and their product.

The product of two spanning terms reduces, through ``S_nu^* S_sigma``, to
a single spanning term or zero.  Elements are kept in a normal form where
no term ends in the same *special* edge on both sides at a vertex that
satisfies a Cuntz-Krieger relation; such a term is rewritten as
``S_mu' S_nu'^* - sum_{f != x} S_{mu'f} S_{nu'f}^*``.

Two path systems are supported: hybrid models (:class:`HybridSystem`) and
ordinary finite graphs with a relative Cuntz-Krieger set
(:class:`GraphSystem`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .graphs import DirectedGraph, GraphAutomorphism, GraphError, GraphPath
from .model import (BlockElement, DElement, FinitePath, HybridModel, ModelError,
                    Vertex, concat, is_prefix, path_from_data, path_to_data, residual)


class AlgebraError(ValueError):
    pass


class Reduced(NamedTuple):
    """``S_nu^* S_sigma = S_a S_b^*`` with a tag naming the case."""

    kind: str       # projection, term, coterm or mixed
    a: object
    b: object


# -- path systems -----------------------------------------------------------


class HybridSystem:
    def __init__(self, model: HybridModel):
        self.model = model
        self.rank = model.rank

    def __eq__(self, other):
        return isinstance(other, HybridSystem) and other.model is self.model

    def __hash__(self):
        return id(self.model)

    def vertex(self, v) -> FinitePath:
        return FinitePath.vertex(v)

    def origin(self, p: FinitePath):
        return p.origin

    def terminus(self, p: FinitePath):
        return p.terminus

    def concat(self, a: FinitePath, b: FinitePath) -> FinitePath:
        return concat(a, b)

    def residual(self, a, b):
        return residual(a, b)

    def length(self, p: FinitePath) -> tuple[int, ...]:
        return self.model.length(p)

    def key(self, p: FinitePath) -> tuple:
        return p.key()

    def label(self, p: FinitePath) -> str:
        return self.model.path_label(p)

    def is_vertex(self, p: FinitePath) -> bool:
        return p.is_vertex

    def star(self, nu: FinitePath, sigma: FinitePath) -> Reduced | None:
        return reduce_star(self.model, nu, sigma)

    def ck_split(self, mu: FinitePath, nu: FinitePath):
        """Trailing special edge shared by both sides, as ``(mu', nu', other steps)``."""
        if not mu.elements or not nu.elements:
            return None
        m = self.model
        a, b = mu.elements[-1], nu.elements[-1]
        if isinstance(a, DElement) and isinstance(b, DElement):
            x = a.edges[-1]
            if x != b.edges[-1]:
                return None
            v = m.d_edges[x].origin
            if not m.is_a_vertex(v) or m.d_exits(v)[0] != x:
                return None
            mu2 = _drop_d(m, mu)
            nu2 = _drop_d(m, nu)
            others = [m.d_edge_path(n) for n in m.d_exits(v) if n != x]
            return mu2, nu2, others
        if isinstance(a, BlockElement) and isinstance(b, BlockElement):
            for c in range(m.rank):
                p, q = a.paths[c], b.paths[c]
                if not p.edges or not q.edges or p.edges[-1] != q.edges[-1]:
                    continue
                g = m.blocks[a.block][c]
                x = p.edges[-1]
                y = g.origin(x)
                if not g.is_regular(y) or g.special_edge(y) != x:
                    continue
                mu2 = _drop_block(m, mu, c)
                nu2 = _drop_block(m, nu, c)
                t = mu2.terminus
                others = [m.block_step(t, c, f) for f in m.coordinate_edges(t, c) if f != x]
                return mu2, nu2, others
        return None


def _drop_d(m: HybridModel, p: FinitePath) -> FinitePath:
    el = p.elements[-1]
    x = el.edges[-1]
    rest = el.edges[:-1]
    o = m.d_edges[x].origin
    elems = p.elements[:-1] + ((DElement(rest, el.origin, o),) if rest else ())
    return FinitePath(p.origin, elems, o)


def _drop_block(m: HybridModel, p: FinitePath, c: int) -> FinitePath:
    el = p.elements[-1]
    g = m.blocks[el.block][c]
    paths = tuple(q.drop_last(g) if j == c else q for j, q in enumerate(el.paths))
    nel = BlockElement(el.block, paths)
    if all(len(q) == 0 for q in paths):
        return FinitePath(p.origin, p.elements[:-1], nel.target)
    return FinitePath(p.origin, p.elements[:-1] + (nel,), nel.target)


def reduce_star(model: HybridModel, nu: FinitePath, sigma: FinitePath) -> Reduced | None:
    """Normal form of ``S_nu^* S_sigma``: None for zero, else ``S_a S_b^*``."""
    r = residual(nu, sigma)
    if r is not None:
        if r.is_vertex:
            return Reduced("projection", r, r)
        return Reduced("term", r, FinitePath.vertex(sigma.terminus))
    r = residual(sigma, nu)
    if r is not None:
        return Reduced("coterm", FinitePath.vertex(nu.terminus), r)
    n = len(nu.elements)
    if (nu.origin != sigma.origin or n == 0 or n != len(sigma.elements)
            or nu.elements[:-1] != sigma.elements[:-1]):
        return None
    x, y = nu.elements[-1], sigma.elements[-1]
    if not (isinstance(x, BlockElement) and isinstance(y, BlockElement)):
        return None
    a_paths, b_paths = [], []
    for p, q in zip(x.paths, y.paths):
        if p.is_prefix_of(q):
            a_paths.append(q.drop_prefix(p))
            b_paths.append(GraphPath.vertex(q.terminus))
        elif q.is_prefix_of(p):
            a_paths.append(GraphPath.vertex(p.terminus))
            b_paths.append(p.drop_prefix(q))
        else:
            return None
    ea, eb = BlockElement(x.block, tuple(a_paths)), BlockElement(x.block, tuple(b_paths))
    a = FinitePath(ea.origin, (ea,), ea.target)
    b = FinitePath(eb.origin, (eb,), eb.target)
    return Reduced("mixed", a, b)


class GraphSystem:
    """Paths in a finite graph ``E``; Cuntz-Krieger relations hold exactly at ``S``."""

    rank = 1

    def __init__(self, graph: DirectedGraph, ck: Iterable[str] = ()):
        self.graph = graph
        self.ck = frozenset(ck)
        for y in self.ck:
            if not graph.is_regular(y):
                raise AlgebraError(f"vertex {y!r} in the relation set is a sink or infinite emitter")

    def __eq__(self, other):
        return isinstance(other, GraphSystem) and (other.graph, other.ck) == (self.graph, self.ck)

    def __hash__(self):
        return hash((self.graph.name, self.ck))

    def vertex(self, v) -> GraphPath:
        return GraphPath.vertex(v)

    def origin(self, p):
        return p.origin

    def terminus(self, p):
        return p.terminus

    def concat(self, a, b):
        return a.concat(b)

    def residual(self, a, b):
        return b.drop_prefix(a) if a.is_prefix_of(b) else None

    def length(self, p) -> tuple[int, ...]:
        return (len(p),)

    def key(self, p) -> tuple:
        return (p.origin, p.edges)

    def label(self, p) -> str:
        return p.label(self.graph)

    def is_vertex(self, p) -> bool:
        return not p.edges

    def star(self, nu, sigma) -> Reduced | None:
        if nu.is_prefix_of(sigma):
            r = sigma.drop_prefix(nu)
            if not r.edges:
                return Reduced("projection", r, r)
            return Reduced("term", r, GraphPath.vertex(sigma.terminus))
        if sigma.is_prefix_of(nu):
            return Reduced("coterm", GraphPath.vertex(nu.terminus), nu.drop_prefix(sigma))
        return None

    def ck_split(self, mu, nu):
        if not mu.edges or not nu.edges or mu.edges[-1] != nu.edges[-1]:
            return None
        g = self.graph
        x = mu.edges[-1]
        y = g.origin(x)
        if y not in self.ck or g.special_edge(y) != x:
            return None
        mu2, nu2 = mu.drop_last(g), nu.drop_last(g)
        others = [GraphPath.of(g, y, [f]) for f in g.out_edges(y) if f != x]
        return mu2, nu2, others


# -- elements ---------------------------------------------------------------


@dataclass(frozen=True)
class SpanningTerm:
    mu: object
    nu: object


class AlgebraElement:
    """A normalized integer combination of spanning terms."""

    __slots__ = ("system", "terms")

    def __init__(self, system, terms: dict | Iterable = (), normalized: bool = False):
        self.system = system
        items = terms.items() if isinstance(terms, dict) else terms
        if normalized:
            self.terms = dict(items)
        else:
            self.terms = _normalize(system, items)

    # construction helpers
    @classmethod
    def zero(cls, system) -> "AlgebraElement":
        return cls(system, {}, normalized=True)

    @classmethod
    def term(cls, system, mu, nu=None, coeff: int = 1) -> "AlgebraElement":
        nu = mu if nu is None else nu
        if system.terminus(mu) != system.terminus(nu):
            raise AlgebraError("spanning term needs t(mu) == t(nu)")
        return cls(system, [((mu, nu), coeff)])

    @classmethod
    def projection(cls, system, v) -> "AlgebraElement":
        p = system.vertex(v)
        return cls.term(system, p, p)

    @classmethod
    def range_projection(cls, system, mu) -> "AlgebraElement":
        return cls.term(system, mu, mu)

    # arithmetic
    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
            if out[k] == 0:
                del out[k]
        return AlgebraElement(self.system, _sorted(self.system, out), normalized=True)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.system, {k: -c for k, c in self.terms.items()}, normalized=True)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, n: int) -> "AlgebraElement":
        if n == 0:
            return AlgebraElement.zero(self.system)
        return AlgebraElement(self.system, {k: n * c for k, c in self.terms.items()}, normalized=True)

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgebraElement) and list(self.terms.items()) == list(other.terms.items())

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.system, [((nu, mu), c) for (mu, nu), c in self.terms.items()],
                              normalized=False)

    def degrees(self) -> set[tuple[int, ...]]:
        return {term_degree(self.system, mu, nu) for mu, nu in self.terms}

    def render(self) -> str:
        if not self.terms:
            return "0"
        s = self.system
        parts = []
        for (mu, nu), c in self.terms.items():
            if mu == nu and s.is_vertex(mu):
                t = f"P[{s.label(mu)}]"
            else:
                t = f"S[{s.label(mu)}]S*[{s.label(nu)}]"
            parts.append((f"{c:+d} " if c not in (1, -1) else ("+ " if c == 1 else "- ")) + t)
        out = " ".join(parts)
        return out[2:] if out.startswith("+ ") else out

    __str__ = render

    def __repr__(self) -> str:
        return f"AlgebraElement({self.render()})"

    def to_data(self) -> list:
        if not isinstance(self.system, HybridSystem):
            raise AlgebraError("serialization is defined for hybrid-model elements")
        return [{"coeff": c, "mu": path_to_data(mu), "nu": path_to_data(nu)}
                for (mu, nu), c in self.terms.items()]

    @classmethod
    def from_data(cls, system: HybridSystem, data: list) -> "AlgebraElement":
        try:
            items = [((path_from_data(system.model, t["mu"]), path_from_data(system.model, t["nu"])),
                      int(t["coeff"])) for t in data]
        except (KeyError, TypeError, ModelError, GraphError) as exc:
            raise AlgebraError(f"malformed term record: {exc}") from exc
        return cls(system, items)


def term_degree(system, mu, nu) -> tuple[int, ...]:
    return tuple(a - b for a, b in zip(system.length(mu), system.length(nu)))


def degree(system, term) -> tuple[int, ...]:
    mu, nu = term.mu, term.nu if isinstance(term, SpanningTerm) else term
    return term_degree(system, mu, nu)


def _sorted(system, terms: dict) -> dict:
    return dict(sorted(terms.items(), key=lambda kv: (system.key(kv[0][0]), system.key(kv[0][1]))))


def _normalize(system, items) -> dict:
    acc: dict = {}
    work = [(k, c) for k, c in items if c]
    while work:
        (mu, nu), c = work.pop()
        split = system.ck_split(mu, nu)
        if split is None:
            acc[(mu, nu)] = acc.get((mu, nu), 0) + c
            continue
        mu2, nu2, others = split
        work.append(((mu2, nu2), c))
        for f in others:
            work.append(((system.concat(mu2, f), system.concat(nu2, f)), -c))
    return _sorted(system, {k: c for k, c in acc.items() if c})


def multiply_terms(system, t1: tuple, t2: tuple):
    """``(S_mu S_nu^*)(S_sigma S_tau^*)`` as a single raw term ``(mu a, tau b)`` or None."""
    mu, nu = t1
    sigma, tau = t2
    r = system.star(nu, sigma)
    if r is None:
        return None
    return system.concat(mu, r.a), system.concat(tau, r.b)


def multiply(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    if x.system != y.system:
        raise AlgebraError("elements live over different path systems")
    raw: dict = {}
    for t1, c1 in x.terms.items():
        for t2, c2 in y.terms.items():
            t = multiply_terms(x.system, t1, t2)
            if t is not None:
                raw[t] = raw.get(t, 0) + c1 * c2
    return AlgebraElement(x.system, raw.items())


def adjoint(x: AlgebraElement) -> AlgebraElement:
    return x.adjoint()


def generators(system: HybridSystem, cap: int) -> tuple[list, list]:
    """Vertex projections and edge partial isometries of a model, block edges below ``cap``."""
    m = system.model
    ps, ss = [], []
    for v in m.vertices():
        ps.append(AlgebraElement.projection(system, v))
        for s in m.steps(v, cap):
            ss.append((s, AlgebraElement.term(system, s, FinitePath.vertex(s.terminus))))
    return ps, ss


# -- automorphisms ------------------------------------------------------------


def _map_vertex(autos: dict, v: Vertex) -> Vertex:
    if v.block < 0:
        return v
    return Vertex(v.block, tuple(autos[(v.block, c)].vertex(y) if (v.block, c) in autos else y
                                 for c, y in enumerate(v.coords)))


def _map_path(autos: dict, p: FinitePath) -> FinitePath:
    els = []
    for el in p.elements:
        if isinstance(el, DElement):
            els.append(el)
        else:
            els.append(BlockElement(el.block, tuple(
                autos[(el.block, c)].path(q) if (el.block, c) in autos else q
                for c, q in enumerate(el.paths))))
    return FinitePath(_map_vertex(autos, p.origin), tuple(els), _map_vertex(autos, p.terminus))


def check_automorphisms(model: HybridModel, autos: dict) -> None:
    for (i, c), a in autos.items():
        g = model.blocks[i][c]
        if a.graph != g:
            raise AlgebraError(f"automorphism for block {i} coordinate {c} is for another graph")
        if a.vertex(g.distinguished) != g.distinguished:
            raise AlgebraError(f"automorphism moves the distinguished vertex of {g.name}")


def apply_automorphism(x: AlgebraElement, autos: dict) -> AlgebraElement:
    """Relabel block edges by graph automorphisms keyed by ``(block, coordinate)``."""
    system = x.system
    if not isinstance(system, HybridSystem):
        raise AlgebraError("automorphisms act on hybrid-model elements")
    check_automorphisms(system.model, autos)
    return AlgebraElement(system, [((_map_path(autos, mu), _map_path(autos, nu)), c)
                                   for (mu, nu), c in x.terms.items()])


def swap_automorphism(g: DirectedGraph, e, f) -> GraphAutomorphism:
    """The automorphism exchanging two parallel edges."""
    e, f = tuple(e), tuple(f)
    return GraphAutomorphism(g, {}, {e: f, f: e})


__all__ = [
    "AlgebraElement", "AlgebraError", "GraphSystem", "HybridSystem", "Reduced", "SpanningTerm",
    "adjoint", "apply_automorphism", "degree", "generators", "multiply", "multiply_terms",
    "reduce_star", "swap_automorphism", "term_degree", "is_prefix",
]
