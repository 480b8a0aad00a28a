"""The hybrid object: product k-graph blocks glued by connecting graphs.

Vertices of a block are tuples of coordinate vertices; the distinguished
vertex tuple of block ``i`` is the gluing vertex ``u_i``.  Consecutive
blocks are joined by a copy of the connecting graph ``D`` with two extra
vertices ``a0``, ``a1`` carrying the loops ``beta``, ``gamma``.

Paths are stored in their unique alternating decomposition: a maximal run
of D-edges is one element, a maximal run of block steps is one element
holding the tuple of coordinate paths.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import NamedTuple, Sequence

from .graphs import DirectedGraph, Edge, GraphError, GraphPath, enumerate_paths, load_graph


class ModelError(ValueError):
    pass


class Vertex(NamedTuple):
    block: int          # -1 for the private vertices of a connecting graph
    coords: tuple

    def label(self) -> str:
        if self.block < 0:
            return self.coords[0]
        return f"B{self.block}({','.join(self.coords)})"


@dataclass(frozen=True)
class DEdge:
    name: str
    role: str           # alpha, beta, gamma, delta or epsilon
    origin: Vertex
    target: Vertex


@dataclass(frozen=True, order=True)
class DElement:
    edges: tuple[str, ...]
    origin: Vertex
    target: Vertex

    kind = "D"


@dataclass(frozen=True)
class BlockElement:
    block: int
    paths: tuple[GraphPath, ...]

    kind = "B"

    @property
    def origin(self) -> Vertex:
        return Vertex(self.block, tuple(p.origin for p in self.paths))

    @property
    def target(self) -> Vertex:
        return Vertex(self.block, tuple(p.terminus for p in self.paths))

    def lengths(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.paths)


Element = DElement | BlockElement


def _elem_key(el) -> tuple:
    if isinstance(el, DElement):
        return (0, el.edges)
    return (1, el.block, tuple(p.edges for p in el.paths))


@dataclass(frozen=True)
class FinitePath:
    origin: Vertex
    elements: tuple = ()
    terminus: Vertex | None = None

    def __post_init__(self):
        if self.terminus is None:
            t = self.elements[-1].target if self.elements else self.origin
            object.__setattr__(self, "terminus", t)

    @classmethod
    def vertex(cls, v: Vertex) -> "FinitePath":
        return cls(v, (), v)

    @property
    def is_vertex(self) -> bool:
        return not self.elements

    def __len__(self) -> int:
        """Number of path elements."""
        return len(self.elements)

    def key(self) -> tuple:
        k = self.__dict__.get("_key")
        if k is None:
            k = (tuple(self.origin), tuple(_elem_key(e) for e in self.elements))
            object.__setattr__(self, "_key", k)
        return k

    def __lt__(self, other: "FinitePath") -> bool:
        return self.key() < other.key()


def _merge(a, b):
    if isinstance(a, DElement):
        return DElement(a.edges + b.edges, a.origin, b.target)
    return BlockElement(a.block, tuple(p.concat(q) for p, q in zip(a.paths, b.paths)))


def _same_kind(a, b) -> bool:
    return isinstance(a, DElement) == isinstance(b, DElement)


def _is_empty(el) -> bool:
    if isinstance(el, DElement):
        return not el.edges
    return all(len(p) == 0 for p in el.paths)


def _elem_residual(a, b):
    """``r`` with ``b = a r`` for elements of one type, else None.  ``r`` may be empty."""
    if isinstance(a, DElement):
        if not isinstance(b, DElement) or a.origin != b.origin:
            return None
        n = len(a.edges)
        if b.edges[:n] != a.edges:
            return None
        return DElement(b.edges[n:], a.target, b.target)
    if not isinstance(b, BlockElement) or a.block != b.block:
        return None
    if not all(p.is_prefix_of(q) for p, q in zip(a.paths, b.paths)):
        return None
    return BlockElement(a.block, tuple(q.drop_prefix(p) for p, q in zip(a.paths, b.paths)))


def _coordinatewise_comparable(a, b) -> bool:
    return (isinstance(a, BlockElement) and isinstance(b, BlockElement) and a.block == b.block
            and all(p.is_prefix_of(q) or q.is_prefix_of(p) for p, q in zip(a.paths, b.paths)))


def concat(mu: FinitePath, nu: FinitePath) -> FinitePath:
    if mu.terminus != nu.origin:
        raise ModelError(f"cannot concatenate: {mu.terminus.label()} != {nu.origin.label()}")
    if not mu.elements:
        return nu
    if not nu.elements:
        return mu
    a, b = mu.elements[-1], nu.elements[0]
    if _same_kind(a, b):
        elems = mu.elements[:-1] + (_merge(a, b),) + nu.elements[1:]
    else:
        elems = mu.elements + nu.elements
    return FinitePath(mu.origin, elems, nu.terminus)


def residual(mu: FinitePath, nu: FinitePath) -> FinitePath | None:
    """The path ``r`` with ``nu = mu r``, or None when ``mu`` is not a prefix of ``nu``."""
    if mu.origin != nu.origin:
        return None
    n = len(mu.elements)
    if n == 0:
        return nu
    if n > len(nu.elements) or mu.elements[:n - 1] != nu.elements[:n - 1]:
        return None
    r = _elem_residual(mu.elements[-1], nu.elements[n - 1])
    if r is None:
        return None
    rest = nu.elements[n:]
    if not _is_empty(r):
        rest = (r,) + rest
    return FinitePath(mu.terminus, rest, nu.terminus)


def is_prefix(mu: FinitePath, nu: FinitePath) -> bool:
    return residual(mu, nu) is not None


def join(mu: FinitePath, nu: FinitePath) -> FinitePath | None:
    """The smallest common extension when one exists in the path order.

    Comparable paths give the longer one; two paths whose only difference
    is a coordinatewise comparable final block element give the
    coordinatewise maximum.  Otherwise there is no common extension.
    """
    if is_prefix(mu, nu):
        return nu
    if is_prefix(nu, mu):
        return mu
    n = len(mu.elements)
    if (mu.origin != nu.origin or n == 0 or n != len(nu.elements)
            or mu.elements[:-1] != nu.elements[:-1]):
        return None
    a, b = mu.elements[-1], nu.elements[-1]
    if not _coordinatewise_comparable(a, b):
        return None
    paths = tuple(q if p.is_prefix_of(q) else p for p, q in zip(a.paths, b.paths))
    return FinitePath(mu.origin, mu.elements[:-1] + (BlockElement(a.block, paths),))


def length(mu: FinitePath, rank: int) -> tuple[int, ...]:
    total = [0] * rank
    for el in mu.elements:
        if isinstance(el, DElement):
            total = [t + len(el.edges) for t in total]
        else:
            total = [t + len(p) for t, p in zip(total, el.paths)]
    return tuple(total)


def vee(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(max(x, y) for x, y in zip(a, b))


def leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


@dataclass(frozen=True)
class TruncatedInfinitePath:
    """A finite stand-in for an infinite path: its prefix seen at a depth and cap."""

    path: FinitePath
    depth: int
    cap: int

    def frontier(self, model: "HybridModel") -> frozenset:
        """Directions in which the underlying path may still grow.

        Coordinates ``0..k-1`` where the coordinate terminus is an infinite
        emitter, plus ``"D"`` at a gluing vertex.
        """
        t = self.path.terminus
        out = set()
        if model.is_a_vertex(t):
            return frozenset({"D"})
        if model.is_u_vertex(t):
            out.add("D")
        for c, g in enumerate(model.blocks[t.block]):
            if g.is_singular(t.coords[c]):
                out.add(c)
        return frozenset(out)


DEFAULT_WIRING = {
    "alpha0": ("u0", "u1"), "epsilon0": ("u0", "a0"), "beta0": ("a0", "a0"),
    "gamma0": ("a0", "a0"), "delta0": ("a0", "u0"),
    "alpha1": ("u1", "u0"), "epsilon1": ("u1", "a1"), "beta1": ("a1", "a1"),
    "gamma1": ("a1", "a1"), "delta1": ("a1", "u1"),
}


def _check_wiring(w: dict) -> None:
    if set(w) != set(DEFAULT_WIRING):
        raise ModelError(f"chain wiring must name exactly {sorted(DEFAULT_WIRING)}")
    for name, (o, t) in w.items():
        role, side = name[:-1], name[-1]
        a = "a" + side
        u = "u" + side
        ok = {
            "alpha": o == u and t in ("u0", "u1"),
            "epsilon": o == u and t in ("a0", "a1"),
            "beta": o == a and t == a,
            "gamma": o == a and t == a,
            "delta": o == a and t in ("u0", "u1"),
        }[role]
        if not ok:
            raise ModelError(f"wiring for {name}: {o}->{t} violates the connecting-graph shape")


class HybridModel:
    """Product blocks ``E_{i,1} x ... x E_{i,k}`` chained by connecting graphs."""

    def __init__(self, blocks: Sequence[Sequence[DirectedGraph]], rank: int,
                 wiring: dict | None = None):
        if rank < 1:
            raise ModelError("rank must be at least 1")
        if not blocks:
            raise ModelError("a model needs at least one block")
        self.rank = rank
        self.blocks: tuple[tuple[DirectedGraph, ...], ...] = tuple(tuple(b) for b in blocks)
        for i, b in enumerate(self.blocks):
            if len(b) != rank:
                raise ModelError(f"block {i} has {len(b)} graphs, expected {rank}")
            for g in b:
                if g.distinguished is None:
                    raise ModelError(f"block {i}: graph {g.name} has no distinguished vertex")
                if not g.is_singular(g.distinguished):
                    raise ModelError(f"block {i}: distinguished vertex of {g.name} is regular")
                if not g.is_strongly_connected():
                    raise ModelError(f"block {i}: graph {g.name} is not irreducible")
        self.wiring = dict(wiring or DEFAULT_WIRING)
        _check_wiring(self.wiring)
        self.u = tuple(Vertex(i, tuple(g.distinguished for g in b))
                       for i, b in enumerate(self.blocks))
        self._build_chain()

    def _build_chain(self):
        n = len(self.blocks)
        copies = [(0, 0)] if n == 1 else [(c, c + 1) for c in range(n - 1)]
        single = len(copies) == 1
        self.d_edges: dict[str, DEdge] = {}
        self.a_vertices: list[Vertex] = []
        for c, (left, right) in enumerate(copies):
            suffix = "" if single else f".{c}"
            where = {"u0": self.u[left], "u1": self.u[right],
                     "a0": Vertex(-1, (f"a0{suffix}",)), "a1": Vertex(-1, (f"a1{suffix}",))}
            self.a_vertices += [where["a0"], where["a1"]]
            for name, (o, t) in self.wiring.items():
                full = name + suffix
                self.d_edges[full] = DEdge(full, name[:-1], where[o], where[t])
        self._d_out: dict[Vertex, list[str]] = {}
        for name, e in self.d_edges.items():
            self._d_out.setdefault(e.origin, []).append(name)

    # -- vertices --------------------------------------------------------

    def is_a_vertex(self, v: Vertex) -> bool:
        return v.block < 0

    def is_u_vertex(self, v: Vertex) -> bool:
        return v.block >= 0 and v == self.u[v.block]

    def has_vertex(self, v: Vertex) -> bool:
        if v.block < 0:
            return v in self.a_vertices
        if v.block >= len(self.blocks) or len(v.coords) != self.rank:
            return False
        return all(c in g.vertices for c, g in zip(v.coords, self.blocks[v.block]))

    def vertices(self) -> list[Vertex]:
        out = []
        for i, b in enumerate(self.blocks):
            for coords in product(*(g.vertices for g in b)):
                out.append(Vertex(i, coords))
        return out + list(self.a_vertices)

    def coordinate_regular(self, v: Vertex, c: int) -> bool:
        return v.block >= 0 and self.blocks[v.block][c].is_regular(v.coords[c])

    # -- edges -----------------------------------------------------------

    def d_exits(self, v: Vertex) -> list[str]:
        """Names of D-edges leaving ``v`` (empty at non-gluing block vertices)."""
        return list(self._d_out.get(v, []))

    def d_edge_path(self, name: str) -> FinitePath:
        e = self.d_edges[name]
        return FinitePath(e.origin, (DElement((name,), e.origin, e.target),), e.target)

    def block_step(self, v: Vertex, c: int, e: Edge) -> FinitePath:
        """The one-edge path at block vertex ``v`` moving along ``e`` in coordinate ``c``."""
        g = self.blocks[v.block][c]
        if not g.has_edge(e) or g.origin(e) != v.coords[c]:
            raise ModelError(f"edge {e} does not leave coordinate {c} of {v.label()}")
        paths = tuple(GraphPath.of(g, v.coords[c], [e]) if j == c else GraphPath.vertex(v.coords[j])
                      for j, g in enumerate(self.blocks[v.block]))
        el = BlockElement(v.block, paths)
        return FinitePath(v, (el,), el.target)

    def coordinate_edges(self, v: Vertex, c: int, cap: int | None = None) -> list[Edge]:
        return self.blocks[v.block][c].out_edges(v.coords[c], cap)

    def steps(self, v: Vertex, cap: int) -> list[FinitePath]:
        """All one-edge paths from ``v`` with edge indices below ``cap``."""
        out = [self.d_edge_path(n) for n in self.d_exits(v)]
        if v.block >= 0:
            for c in range(self.rank):
                out += [self.block_step(v, c, e) for e in self.coordinate_edges(v, c, cap)]
        return out

    def emits(self, v: Vertex) -> bool:
        if self.d_exits(v):
            return True
        return v.block >= 0 and any(self.blocks[v.block][c].out_degree(v.coords[c]) > 0
                                    for c in range(self.rank))

    # -- path calculus ---------------------------------------------------

    def length(self, mu: FinitePath) -> tuple[int, ...]:
        return length(mu, self.rank)

    def path(self, origin: Vertex, steps: Sequence) -> FinitePath:
        """Build a path from a step list: D-edge names or ``(c, edge)`` block steps."""
        p = FinitePath.vertex(origin)
        for s in steps:
            if isinstance(s, str):
                if self.d_edges[s].origin != p.terminus:
                    raise ModelError(f"D-edge {s} does not leave {p.terminus.label()}")
                q = self.d_edge_path(s)
            else:
                c, e = s
                q = self.block_step(p.terminus, c, tuple(e))
            p = concat(p, q)
        return p

    def validate(self, mu: FinitePath) -> None:
        cur = mu.origin
        if not self.has_vertex(cur):
            raise ModelError(f"unknown vertex {cur}")
        prev = None
        for el in mu.elements:
            if el.origin != cur:
                raise ModelError("path elements are not composable")
            if prev is not None and _same_kind(prev, el):
                raise ModelError("adjacent path elements of the same type")
            if _is_empty(el):
                raise ModelError("empty path element")
            if isinstance(el, DElement):
                v = cur
                for name in el.edges:
                    d = self.d_edges.get(name)
                    if d is None or d.origin != v:
                        raise ModelError(f"bad D-edge {name}")
                    v = d.target
                if v != el.target:
                    raise ModelError("D element terminus mismatch")
            else:
                for c, p in enumerate(el.paths):
                    GraphPath.of(self.blocks[el.block][c], p.origin, p.edges)
            prev = el
            cur = el.target
        if cur != mu.terminus:
            raise ModelError("path terminus mismatch")

    def paths_from(self, v: Vertex, bound: Sequence[int], cap: int) -> list[FinitePath]:
        """All paths from ``v`` with length ``<= bound`` and edge indices below ``cap``."""
        bound = tuple(bound)
        if any(b < 0 for b in bound):
            return []
        out = [FinitePath.vertex(v)]
        for kind in ("D", "B"):
            out += [FinitePath(v, els, els[-1].target) for els in self._tails(v, bound, cap, kind)]
        return sorted(out, key=FinitePath.key)

    def _tails(self, v: Vertex, bound: tuple, cap: int, kind: str) -> list[tuple]:
        """Nonempty element strings from ``v`` whose first element has type ``kind``."""
        key = (v, bound, cap, kind)
        memo = self.__dict__.setdefault("_tail_memo", {})
        if key in memo:
            return memo[key]
        out = []
        for el in self._first_elements(v, bound, cap, kind):
            out.append((el,))
            t = el.target
            if kind == "B" and not self.d_exits(t):
                continue
            if kind == "D" and t.block < 0:
                continue
            ell = length(FinitePath(v, (el,), t), self.rank)
            rest = tuple(b - x for b, x in zip(bound, ell))
            for tail in self._tails(t, rest, cap, "B" if kind == "D" else "D"):
                out.append((el,) + tail)
        memo[key] = out
        return out

    def _first_elements(self, v: Vertex, bound: tuple, cap: int, kind: str) -> list:
        if kind == "D":
            n = min(bound)
            out = []
            stack = [((), v)]
            while stack:
                names, cur = stack.pop()
                if len(names) == n:
                    continue
                for name in self.d_exits(cur):
                    nn = names + (name,)
                    t = self.d_edges[name].target
                    out.append(DElement(nn, v, t))
                    stack.append((nn, t))
            return out
        if v.block < 0:
            return []
        per = [enumerate_paths(g, v.coords[c], bound[c], cap)
               for c, g in enumerate(self.blocks[v.block])]
        return [BlockElement(v.block, ps) for ps in product(*per) if any(len(p) for p in ps)]

    def factorize(self, mu: FinitePath, x: TruncatedInfinitePath,
                  mu2: FinitePath) -> tuple[FinitePath, TruncatedInfinitePath]:
        """Refactor ``mu x`` through the join of ``mu`` and ``mu2``.

        Requires ``mu2`` to be a prefix of the visible part of ``mu x``.
        """
        full = concat(mu, x.path)
        if not is_prefix(mu2, full):
            raise ModelError("the two presentations do not denote the same path")
        nu = join(mu, mu2)
        if nu is None or not is_prefix(nu, full):
            raise ModelError("no common factorization visible at this truncation")
        assert self.length(nu) == vee(self.length(mu), self.length(mu2))
        return nu, TruncatedInfinitePath(residual(nu, full), x.depth, x.cap)

    # -- labels and serialization ----------------------------------------

    def element_label(self, el) -> str:
        if isinstance(el, DElement):
            return ".".join(el.edges) if len(el.edges) > 1 else el.edges[0]
        parts = []
        for c, p in enumerate(el.paths):
            parts.append(p.label(self.blocks[el.block][c]))
        return f"B{el.block}(" + "; ".join(parts) + ")"

    def path_label(self, mu: FinitePath) -> str:
        if mu.is_vertex:
            return mu.origin.label()
        return " ".join(self.element_label(el) for el in mu.elements)

    def to_data(self) -> dict:
        return {"rank": self.rank,
                "blocks": [[g.to_data() for g in b] for b in self.blocks],
                "chain_wiring": {k: list(v) for k, v in self.wiring.items()}}


def build_model(blocks: Sequence[Sequence[DirectedGraph]], k: int,
                wiring: dict | None = None) -> HybridModel:
    return HybridModel(blocks, k, wiring)


def path_to_data(mu: FinitePath) -> dict:
    def el(e):
        if isinstance(e, DElement):
            return {"D": list(e.edges)}
        return {"block": e.block,
                "paths": [{"from": p.origin, "edges": [list(x) for x in p.edges]} for p in e.paths]}
    return {"origin": [mu.origin.block, list(mu.origin.coords)],
            "elements": [el(e) for e in mu.elements]}


def path_from_data(model: HybridModel, data: dict) -> FinitePath:
    b, coords = data["origin"]
    p = FinitePath.vertex(Vertex(b, tuple(coords)))
    for e in data["elements"]:
        if "D" in e:
            for name in e["D"]:
                p = concat(p, model.d_edge_path(name))
        else:
            blk = e["block"]
            paths = tuple(GraphPath.of(model.blocks[blk][c], q["from"], [tuple(x) for x in q["edges"]])
                          for c, q in enumerate(e["paths"]))
            el = BlockElement(blk, paths)
            p = concat(p, FinitePath(el.origin, (el,), el.target))
    model.validate(p)
    return p


def load_model(path: str | Path) -> HybridModel:
    """Read a model file; graph entries are inline records or file references."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        rank = data["rank"]
        blocks = []
        for b in data["blocks"]:
            gs = []
            for entry in b:
                if isinstance(entry, str):
                    gs.append(load_graph(path.parent / entry))
                elif "file" in entry:
                    g = load_graph(path.parent / entry["file"])
                    if "distinguished" in entry:
                        g = DirectedGraph(g.name, g.vertices, g.bundles,
                                          entry["distinguished"], g.fragment)
                    gs.append(g)
                else:
                    gs.append(DirectedGraph.from_data(entry))
            blocks.append(gs)
        wiring = data.get("chain_wiring")
        if wiring is not None:
            wiring = {k: tuple(v) for k, v in wiring.items()}
    except (KeyError, TypeError) as exc:
        raise ModelError(f"{path}: malformed model record ({exc})") from exc
    except GraphError as exc:
        raise ModelError(str(exc)) from exc
    return HybridModel(blocks, rank, wiring)
