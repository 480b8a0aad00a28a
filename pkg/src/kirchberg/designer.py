"""Hybrid models with prescribed K-theory.

Each block of a model contributes the Kunneth product of the K-groups of
its graphs, and the blocks add.  A request is a list of per-block
K-theory pairs; every pair is realized by an exhaustive search over
k-element multisets of catalog entries.

Finite graphs with an infinite emitter always have K0 of positive rank, so
pure-torsion K0 and trivial K0 can only come from infinite graphs.  Those
entries are finite windows (``fragment=True``) that carry their K-theory
as a citation-backed annotation.  Finite graphs without an infinite
emitter (the Cuntz graphs ``C_{n+1}``) are listed for K-level experiments
but flagged ``relaxed``: they cannot serve as blocks of a model.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .graphs import INF, DirectedGraph, cuntz_graph
from .ktheory import GradedK, KAnnotation, KTheoryError, graph_k, kunneth_all, model_k, Z, ZERO
from .ktheory import FgAbelianGroup, annotations_to_data
from .model import HybridModel

ENGINE = "engine-computed"
ANNOTATED = "citation-annotated"

RANGE_CITATION = ("range of K-invariants for graph algebras with infinite emitters "
                  "(W. Szymanski); realized by an infinite graph, stored as a finite window")


class DesignError(ValueError):
    pass


class UnsatisfiableRequest(DesignError):
    def __init__(self, request: GradedK, k: int, examined: int, reason: str):
        self.request, self.k, self.examined, self.reason = request, k, examined, reason
        super().__init__(f"cannot realize {request.pair()} as a {k}-fold product of catalog "
                         f"entries ({examined} combinations examined): {reason}")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    graph: DirectedGraph
    k: GradedK
    status: str
    relaxed: bool = False
    provenance: str = ""

    @property
    def usable_as_block(self) -> bool:
        g = self.graph
        return (not self.relaxed and g.distinguished is not None
                and g.is_infinite_emitter(g.distinguished))

    def annotation(self) -> KAnnotation | None:
        if self.status == ANNOTATED:
            return KAnnotation(self.graph.name, self.k, self.provenance)
        return None

    def to_data(self) -> dict:
        return {"name": self.name, "status": self.status, "relaxed": self.relaxed,
                "k0": self.k.k0.render(), "k1": self.k.k1.render(),
                "provenance": self.provenance, "graph": self.graph.to_data()}

    @classmethod
    def from_data(cls, d: dict) -> "CatalogEntry":
        try:
            return cls(d["name"], DirectedGraph.from_data(d["graph"]),
                       GradedK(FgAbelianGroup.parse(d["k0"]), FgAbelianGroup.parse(d["k1"])),
                       d["status"], bool(d.get("relaxed", False)), d.get("provenance", ""))
        except (KeyError, TypeError) as exc:
            raise DesignError(f"malformed catalog entry: {exc}") from exc


def window_graph(name: str, back_edges: int = 1) -> DirectedGraph:
    """A finite window of an infinite graph: an infinite emitter ``v`` and a return vertex."""
    return DirectedGraph.from_edges(name, ["v", "w"],
                                    [("v", "v", "inf"), ("v", "w", 1), ("w", "v", back_edges)],
                                    distinguished="v", fragment=True)


def default_catalog() -> list[CatalogEntry]:
    out = [CatalogEntry("Linf", cuntz_graph(INF), GradedK(Z, ZERO), ENGINE,
                        provenance="one vertex emitting infinitely many loops")]
    for n in range(1, 9):
        g = cuntz_graph(n + 1)
        out.append(CatalogEntry(g.name, g, GradedK(FgAbelianGroup.from_cyclics(0, [n]), ZERO),
                                ENGINE, relaxed=True,
                                provenance="finite Cuntz graph; no infinite emitter"))
    for n in range(2, 13):
        out.append(CatalogEntry(f"T{n}", window_graph(f"T{n}"),
                                GradedK(FgAbelianGroup.from_cyclics(0, [n]), ZERO),
                                ANNOTATED, provenance=RANGE_CITATION))
    out.append(CatalogEntry("U1", window_graph("U1"), GradedK(ZERO, Z), ANNOTATED,
                            provenance=RANGE_CITATION))
    return out


def load_catalog(path: str | Path) -> list[CatalogEntry]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DesignError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    entries = data.get("entries") if isinstance(data, dict) else data
    if not isinstance(entries, list):
        raise DesignError(f"{path}: expected a list of catalog entries")
    return [CatalogEntry.from_data(d) for d in entries]


def dump_catalog(entries: Sequence[CatalogEntry]) -> str:
    return json.dumps({"entries": [e.to_data() for e in entries]}, indent=2) + "\n"


@dataclass
class CatalogCheck:
    ok: bool
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def to_data(self) -> dict:
        return {"name": "catalog", "ok": self.ok, "rows": self.rows, "failures": self.failures}


def verify_catalog(entries: Sequence[CatalogEntry] | None = None) -> CatalogCheck:
    """Recompute engine entries; list annotated ones with their provenance."""
    entries = default_catalog() if entries is None else entries
    rows, failures = [], []
    for e in entries:
        row = {"name": e.name, "status": e.status, "k": e.k.pair(), "relaxed": e.relaxed}
        if e.status == ENGINE:
            if e.graph.fragment:
                failures.append(f"{e.name}: engine entry is a fragment")
            got = graph_k(e.graph)
            row["recomputed"] = got.pair()
            if got != e.k:
                failures.append(f"{e.name}: recorded {e.k.pair()} but computes to {got.pair()}")
        elif e.status == ANNOTATED:
            if not e.provenance:
                failures.append(f"{e.name}: annotation without provenance")
            if not e.graph.fragment:
                failures.append(f"{e.name}: annotated graphs must be marked as fragments")
            row["provenance"] = e.provenance
        else:
            failures.append(f"{e.name}: unknown status {e.status!r}")
        rows.append(row)
    return CatalogCheck(not failures, rows, failures)


@dataclass
class Design:
    model: HybridModel
    predicted: GradedK
    factorization: list            # per block, the catalog entry names in coordinate order
    annotations: list

    def recompute(self) -> GradedK:
        return model_k(self.model, self.annotations)

    def model_data(self) -> dict:
        """A model file record: the model plus the annotations it relies on."""
        return {**self.model.to_data(), "annotations": annotations_to_data(self.annotations)}

    def to_data(self) -> dict:
        return {"predicted": self.predicted.pair(), "factorization": self.factorization,
                "model": self.model_data()}


def _order(combo: tuple) -> tuple:
    """Cast roles: entries with K-theory (Z, 0) or (0, Z) play F and go last."""
    f_role = (GradedK(Z, ZERO), GradedK(ZERO, Z))
    return tuple(sorted(combo, key=lambda e: (e.k in f_role, e.k.k1 == Z, e.name)))


def factorize(request: GradedK, k: int, entries: Sequence[CatalogEntry]) -> tuple[CatalogEntry, ...]:
    """The first k-multiset of usable entries whose Kunneth product equals ``request``.

    Combinations with fewer annotated entries are preferred; ties break by name.
    """
    usable = sorted((e for e in entries if e.usable_as_block),
                    key=lambda e: (e.status != ENGINE, e.name))
    if not usable:
        raise UnsatisfiableRequest(request, k, 0, "no catalog entry can serve as a block")
    combos = list(itertools.combinations_with_replacement(usable, k))
    combos.sort(key=lambda c: (sum(e.status != ENGINE for e in c), [e.name for e in c]))
    for combo in combos:
        if kunneth_all([e.k for e in combo]) == request:
            return _order(combo)
    reason = _missing_factor(request, usable)
    raise UnsatisfiableRequest(request, k, len(combos), reason)


def _missing_factor(request: GradedK, usable: Sequence[CatalogEntry]) -> str:
    orders = sorted({d for e in usable for g in (e.k.k0, e.k.k1) for d in g.invariant_factors})
    wanted = sorted(set(request.k0.invariant_factors) | set(request.k1.invariant_factors))
    missing = [d for d in wanted if not any(o % d == 0 for o in orders)]
    if missing:
        return f"no entry has torsion divisible by {missing} (available orders: {orders})"
    return "the available factors do not combine to this pair"


def realize(requests: Sequence[GradedK], k: int = 2,
            entries: Sequence[CatalogEntry] | None = None) -> Design:
    """Build a model whose K-theory is the direct sum of the per-block requests."""
    if not requests:
        raise DesignError("at least one block must be requested")
    if k < 1:
        raise DesignError("k must be positive")
    entries = default_catalog() if entries is None else list(entries)
    blocks, names, anns = [], [], {}
    for req in requests:
        combo = factorize(req, k, entries)
        blocks.append([e.graph for e in combo])
        names.append([e.name for e in combo])
        for e in combo:
            a = e.annotation()
            if a is not None:
                anns[a.graph] = a
    model = HybridModel(blocks, k)
    predicted = GradedK()
    for req in requests:
        predicted = predicted + req
    design = Design(model, predicted, names, list(anns.values()))
    got = design.recompute()
    if got != predicted:
        raise DesignError(f"internal: predicted {predicted.pair()} but model computes {got.pair()}")
    return design


def parse_request(text: str) -> list[GradedK]:
    """Blocks separated by ``;``, each ``(G, H)`` or ``K0 = G, K1 = H``."""
    parts = [p for p in (s.strip() for s in text.split(";")) if p]
    if not parts:
        raise DesignError("empty request")
    try:
        return [GradedK.parse(p) for p in parts]
    except KTheoryError as exc:
        raise DesignError(str(exc)) from exc


def tamper(entry: CatalogEntry, k: GradedK) -> CatalogEntry:
    """A copy of ``entry`` recording different K-theory (for integrity tests)."""
    return replace(entry, k=k)
