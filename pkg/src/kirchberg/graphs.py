"""Directed graphs with possibly infinite edge bundles.

A graph is a finite vertex list together with *bundles* of parallel edges.
A bundle carries a multiplicity that is a positive integer or ``INF``;
edges inside a bundle are addressed by ``(bundle_index, edge_index)`` and
infinite bundles are materialized lazily up to an explicit cap.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

INF = math.inf

Edge = tuple[int, int]


class GraphError(ValueError):
    """Malformed graph input."""


@dataclass(frozen=True)
class EdgeBundle:
    origin: str
    target: str
    count: float | int

    @property
    def infinite(self) -> bool:
        return self.count == INF


@dataclass(frozen=True)
class DirectedGraph:
    name: str
    vertices: tuple[str, ...]
    bundles: tuple[EdgeBundle, ...]
    distinguished: str | None = None
    # the vertex list is a finite fragment of a graph with infinitely many vertices
    fragment: bool = False

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise GraphError(f"{self.name}: duplicate vertices")
        for b in self.bundles:
            if b.origin not in vs or b.target not in vs:
                raise GraphError(f"{self.name}: bundle {b} uses an undeclared vertex")
            if not (b.count == INF or (isinstance(b.count, int) and b.count > 0)):
                raise GraphError(f"{self.name}: bad multiplicity {b.count!r}")
        if self.distinguished is not None:
            if self.distinguished not in vs:
                raise GraphError(f"{self.name}: unknown distinguished vertex {self.distinguished!r}")
            if not self.is_infinite_emitter(self.distinguished):
                raise GraphError(
                    f"{self.name}: distinguished vertex {self.distinguished!r} "
                    "must emit infinitely many edges")

    @classmethod
    def from_edges(cls, name, vertices, edges, distinguished=None, fragment=False):
        """Build from ``(origin, target, count)`` triples; ``count`` may be ``"inf"``."""
        bundles = []
        for o, t, c in edges:
            if c == "inf" or c == INF:
                c = INF
            bundles.append(EdgeBundle(str(o), str(t), c))
        return cls(str(name), tuple(str(v) for v in vertices), tuple(bundles),
                   None if distinguished is None else str(distinguished), fragment)

    # -- local structure -------------------------------------------------

    def out_bundles(self, v: str) -> list[int]:
        return [i for i, b in enumerate(self.bundles) if b.origin == v]

    def out_degree(self, v: str) -> float | int:
        return sum((self.bundles[i].count for i in self.out_bundles(v)), 0)

    def is_infinite_emitter(self, v: str) -> bool:
        return self.out_degree(v) == INF

    def is_singular(self, v: str) -> bool:
        d = self.out_degree(v)
        return d == INF or d == 0

    def is_regular(self, v: str) -> bool:
        return not self.is_singular(v)

    @property
    def regular_vertices(self) -> list[str]:
        return [v for v in self.vertices if self.is_regular(v)]

    @property
    def singular_vertices(self) -> list[str]:
        return [v for v in self.vertices if self.is_singular(v)]

    @property
    def infinite_emitters(self) -> list[str]:
        return [v for v in self.vertices if self.is_infinite_emitter(v)]

    def has_edge(self, e: Edge) -> bool:
        b, i = e
        return 0 <= b < len(self.bundles) and 0 <= i < self.bundles[b].count

    def origin(self, e: Edge) -> str:
        return self.bundles[e[0]].origin

    def target(self, e: Edge) -> str:
        return self.bundles[e[0]].target

    def out_edges(self, v: str, cap: int | None = None) -> list[Edge]:
        """Edges leaving ``v``; infinite bundles contribute indices below ``cap``."""
        out = []
        for b in self.out_bundles(v):
            n = self.bundles[b].count
            if n == INF:
                if cap is None:
                    raise GraphError(f"{self.name}: vertex {v!r} is an infinite emitter; pass a cap")
                n = cap
            elif cap is not None:
                n = min(n, cap)
            out.extend((b, i) for i in range(int(n)))
        return out

    def has_edge_beyond(self, v: str, cap: int) -> bool:
        """Whether ``v`` emits an edge with index ``>= cap`` in some bundle."""
        return any(self.bundles[b].count > cap for b in self.out_bundles(v))

    def edge_label(self, e: Edge) -> str:
        return f"e{e[0]}.{e[1]}"

    def special_edge(self, v: str) -> Edge:
        """The distinguished out-edge at a regular vertex used by normal forms."""
        if not self.is_regular(v):
            raise GraphError(f"{v!r} is not regular")
        return (self.out_bundles(v)[0], 0)

    def is_strongly_connected(self) -> bool:
        if not self.vertices:
            return False
        adj = {v: set() for v in self.vertices}
        radj = {v: set() for v in self.vertices}
        for b in self.bundles:
            adj[b.origin].add(b.target)
            radj[b.target].add(b.origin)

        def reach(start, nbrs):
            seen, stack = {start}, [start]
            while stack:
                for w in nbrs[stack.pop()]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            return seen

        v0 = self.vertices[0]
        n = len(self.vertices)
        return len(reach(v0, adj)) == n and len(reach(v0, radj)) == n

    def is_single_cycle(self) -> bool:
        total = sum(self.bundles_count_finite())
        return (self.is_strongly_connected() and total == len(self.vertices)
                and all(self.out_degree(v) == 1 for v in self.vertices))

    def bundles_count_finite(self) -> Iterator[float]:
        return (b.count for b in self.bundles)

    # -- serialization ----------------------------------------------------

    def to_data(self) -> dict:
        data = {
            "name": self.name,
            "vertices": list(self.vertices),
            "edges": [{"from": b.origin, "to": b.target,
                       "count": "inf" if b.infinite else b.count} for b in self.bundles],
        }
        if self.distinguished is not None:
            data["distinguished"] = self.distinguished
        if self.fragment:
            data["fragment"] = True
        return data

    @classmethod
    def from_data(cls, data: dict) -> "DirectedGraph":
        try:
            edges = [(e["from"], e["to"], e["count"]) for e in data["edges"]]
            return cls.from_edges(data["name"], data["vertices"], edges,
                                  data.get("distinguished"), bool(data.get("fragment", False)))
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed graph record: missing or bad field {exc}") from exc


def load_graph(path: str | Path) -> DirectedGraph:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return DirectedGraph.from_data(data)


def cuntz_graph(n: int, name: str | None = None) -> DirectedGraph:
    """One vertex with ``n`` loops (``n`` may be ``INF``)."""
    label = name or ("Linf" if n == INF else f"C{n}")
    return DirectedGraph.from_edges(label, ["v"], [("v", "v", n)],
                                    distinguished="v" if n == INF else None)


@dataclass(frozen=True)
class GraphPath:
    origin: str
    edges: tuple[Edge, ...]
    terminus: str

    def __len__(self) -> int:
        return len(self.edges)

    @classmethod
    def vertex(cls, v: str) -> "GraphPath":
        return cls(v, (), v)

    @classmethod
    def of(cls, g: DirectedGraph, origin: str, edges: Iterable[Edge]) -> "GraphPath":
        edges = tuple(tuple(e) for e in edges)
        cur = origin
        for e in edges:
            if not g.has_edge(e) or g.origin(e) != cur:
                raise GraphError(f"{g.name}: edge {e} does not continue a path at {cur!r}")
            cur = g.target(e)
        return cls(origin, edges, cur)

    def extend(self, g: DirectedGraph, e: Edge) -> "GraphPath":
        if g.origin(e) != self.terminus:
            raise GraphError(f"edge {e} does not start at {self.terminus!r}")
        return GraphPath(self.origin, self.edges + (e,), g.target(e))

    def concat(self, other: "GraphPath") -> "GraphPath":
        if self.terminus != other.origin:
            raise GraphError("non-composable graph paths")
        return GraphPath(self.origin, self.edges + other.edges, other.terminus)

    def is_prefix_of(self, other: "GraphPath") -> bool:
        return (self.origin == other.origin and len(self.edges) <= len(other.edges)
                and other.edges[:len(self.edges)] == self.edges)

    def drop_prefix(self, prefix: "GraphPath") -> "GraphPath":
        return GraphPath(prefix.terminus, self.edges[len(prefix.edges):], self.terminus)

    def drop_last(self, g: DirectedGraph) -> "GraphPath":
        e = self.edges[-1]
        return GraphPath(self.origin, self.edges[:-1], g.origin(e))

    def label(self, g: DirectedGraph | None = None) -> str:
        if not self.edges:
            return self.origin
        lab = (g.edge_label if g else (lambda e: f"e{e[0]}.{e[1]}"))
        return " ".join(lab(e) for e in self.edges)


def enumerate_paths(g: DirectedGraph, start: str, max_len: int, edge_cap: int) -> list[GraphPath]:
    """All paths from ``start`` of length ``<= max_len`` using edge indices ``< edge_cap``.

    Output is in depth-first lexicographic order (shorter prefixes first).
    """
    if start not in g.vertices:
        raise GraphError(f"{g.name}: unknown vertex {start!r}")
    if max_len < 0 or edge_cap < 1:
        raise GraphError("max_len must be >= 0 and edge_cap >= 1")
    out: list[GraphPath] = []

    def walk(p: GraphPath):
        out.append(p)
        if len(p) == max_len:
            return
        for e in g.out_edges(p.terminus, edge_cap):
            walk(p.extend(g, e))

    walk(GraphPath.vertex(start))
    return out


def paths_of_length(g: DirectedGraph, n: int, cap: int | None = None) -> list[GraphPath]:
    """All paths of length exactly ``n`` (every origin)."""
    level = [GraphPath.vertex(v) for v in g.vertices]
    for _ in range(n):
        level = [p.extend(g, e) for p in level for e in g.out_edges(p.terminus, cap)]
    return level


@dataclass(frozen=True)
class LabeledMatrix:
    rows: tuple[str, ...]
    cols: tuple[str, ...]
    entries: np.ndarray

    @property
    def shape(self):
        return self.entries.shape


def regular_adjacency(g: DirectedGraph) -> LabeledMatrix:
    """Edge counts ``v -> w`` for regular ``v`` (rows) against all vertices (columns)."""
    rows = tuple(g.regular_vertices)
    index = {v: j for j, v in enumerate(g.vertices)}
    m = np.zeros((len(rows), len(g.vertices)), dtype=np.int64)
    for r, v in enumerate(rows):
        for b in g.out_bundles(v):
            bundle = g.bundles[b]
            assert bundle.count != INF, "regular vertex with an infinite bundle"
            m[r, index[bundle.target]] += bundle.count
    return LabeledMatrix(rows, tuple(g.vertices), m)


@dataclass(frozen=True)
class SubgraphFiltration:
    """Increasing finite subgraphs of ``base``.

    Level ``k`` keeps, from every bundle, the edge indices below
    ``caps[k-1]`` (finite bundles are clipped at their multiplicity).
    """

    base: DirectedGraph
    caps: tuple[int, ...] = field(default=())

    @classmethod
    def default(cls, g: DirectedGraph, levels: int) -> "SubgraphFiltration":
        # level k keeps k+1 indices: a single kept loop would be a circuit
        return cls(g, tuple(k + 1 for k in range(1, levels + 1)))

    def __post_init__(self):
        if any(c < 1 for c in self.caps):
            raise GraphError("filtration caps must be positive")
        if any(a > b for a, b in zip(self.caps, self.caps[1:])):
            raise GraphError("filtration caps must be non-decreasing")

    @property
    def depth(self) -> int:
        return len(self.caps)

    def cap(self, k: int) -> int:
        if not 1 <= k <= len(self.caps):
            raise GraphError(f"filtration level {k} is not materialized")
        return self.caps[k - 1]

    def level_edges(self, k: int) -> set[Edge]:
        c = self.cap(k)
        return {(b, i) for b, bundle in enumerate(self.base.bundles)
                for i in range(int(min(bundle.count, c)))}

    def level_graph(self, k: int) -> DirectedGraph:
        c = self.cap(k)
        g = self.base
        return DirectedGraph(f"{g.name}[{k}]", g.vertices,
                             tuple(EdgeBundle(b.origin, b.target, int(min(b.count, c)))
                                   for b in g.bundles))

    def saturated(self, k: int) -> list[str]:
        """Vertices emitting no edges of ``base`` beyond those kept at level ``k``."""
        c = self.cap(k)
        return [v for v in self.base.vertices
                if all(self.base.bundles[b].count <= c for b in self.base.out_bundles(v))]

    def check_level(self, k: int) -> None:
        h = self.level_graph(k)
        if not h.is_strongly_connected():
            raise GraphError(f"{h.name}: filtration level is not irreducible")
        if h.is_single_cycle():
            raise GraphError(f"{h.name}: filtration level is a single circuit")

    def is_nested(self, k: int) -> bool:
        return self.level_edges(k) <= self.level_edges(k + 1)


@dataclass(frozen=True)
class GraphAutomorphism:
    """Finite-support automorphism: vertex permutation plus an edge bijection.

    Edges missing from ``edge_map`` are fixed.
    """

    graph: DirectedGraph
    vertex_map: dict
    edge_map: dict

    def __post_init__(self):
        g = self.graph
        vm = {v: self.vertex_map.get(v, v) for v in g.vertices}
        if sorted(vm.values()) != sorted(g.vertices):
            raise GraphError("vertex map is not a permutation")
        moved = set(self.edge_map)
        if set(self.edge_map.values()) != moved:
            raise GraphError("edge map is not a bijection on its support")
        for b, bundle in enumerate(g.bundles):
            if (vm[bundle.origin], vm[bundle.target]) != (bundle.origin, bundle.target):
                # a bundle whose ends move must be moved edge by edge
                if bundle.infinite:
                    raise GraphError("cannot move an infinite bundle with a finite edge map")
                for i in range(bundle.count):
                    if (b, i) not in self.edge_map:
                        raise GraphError(f"edge {(b, i)} is not mapped consistently")
        for e, f in self.edge_map.items():
            if not (g.has_edge(e) and g.has_edge(f)):
                raise GraphError(f"edge map uses unknown edge {e} or {f}")
            if (vm[g.origin(e)], vm[g.target(e)]) != (g.origin(f), g.target(f)):
                raise GraphError(f"edge map {e}->{f} does not respect origin/terminus")

    def vertex(self, v: str) -> str:
        return self.vertex_map.get(v, v)

    def edge(self, e: Edge) -> Edge:
        return tuple(self.edge_map.get(tuple(e), tuple(e)))

    def path(self, p: GraphPath) -> GraphPath:
        return GraphPath(self.vertex(p.origin), tuple(self.edge(e) for e in p.edges),
                         self.vertex(p.terminus))
