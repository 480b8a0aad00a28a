"""Cylinder sets ``Z(mu)``, ``V(mu; B, C)`` and the ring of their finite
disjoint unions.

Internally every basic set is read as a *pattern*: a stem ``j`` together
with a set of excluded one-step extensions of ``j``, meaning
``Z(j)`` minus the cylinders of the excluded extensions.  Intersections of
patterns are again patterns, and a pattern is turned back into a disjoint
list of basic sets by :func:`cover`.  This reproduces every case of the
ring-closure case analysis without enumerating the cases one by one.

The membership oracle works on truncations.  Fix ``depth`` and ``cap`` and
let ``U`` be the finite paths with every length coordinate at most
``depth`` whose edges have index below ``cap``.  Each infinite path has a
largest prefix in ``U``; grouping infinite paths by that prefix cuts the
path space into finitely many *atoms*.  When every stem in play lies in
``U`` with one step to spare, each basic set is a union of atoms, so set
identities can be checked exactly on atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .graphs import Edge
from .model import (BlockElement, DElement, FinitePath, HybridModel, ModelError,
                    TruncatedInfinitePath, concat, is_prefix, join, residual)


class CylinderError(ValueError):
    pass


@dataclass(frozen=True)
class BasicSet:
    kind: str                       # "Z" or "V"
    stem: FinitePath
    blocked: tuple = ()             # per coordinate, a frozenset of edges (kind V only)

    def __post_init__(self):
        if self.kind not in ("Z", "V"):
            raise CylinderError(f"unknown basic set kind {self.kind!r}")
        if self.kind == "Z" and any(self.blocked):
            raise CylinderError("Z sets carry no blocking edges")

    def label(self, model: HybridModel) -> str:
        s = model.path_label(self.stem)
        if self.kind == "Z":
            return f"Z({s})"
        if not any(self.blocked):
            return f"V({s})"
        blocks = ";".join("{" + ",".join(f"e{b}.{i}" for b, i in sorted(bs)) + "}"
                          for bs in self.blocked)
        return f"V({s};{blocks})"


def Zset(stem: FinitePath) -> BasicSet:
    return BasicSet("Z", stem)


def Vset(model: HybridModel, stem: FinitePath, blocked: Sequence[Iterable[Edge]] | None = None) -> BasicSet:
    if blocked is None:
        blocked = [()] * model.rank
    bs = tuple(frozenset(tuple(e) for e in b) for b in blocked)
    if len(bs) != model.rank:
        raise CylinderError("one blocking set per coordinate is required")
    return BasicSet("V", stem, bs if any(bs) else ())


def validate(model: HybridModel, a: BasicSet) -> None:
    """Raise unless ``a`` satisfies the constraints on stems and blocking sets."""
    try:
        model.validate(a.stem)
    except ModelError as exc:
        raise CylinderError(str(exc)) from exc
    if not any(a.blocked):
        return
    t = a.stem.terminus
    if model.is_a_vertex(t):
        raise CylinderError("blocking sets need a block terminus")
    if len(a.blocked) != model.rank:
        raise CylinderError("one blocking set per coordinate is required")
    for c, bs in enumerate(a.blocked):
        if not bs:
            continue
        g = model.blocks[t.block][c]
        y = t.coords[c]
        if not g.is_infinite_emitter(y):
            raise CylinderError(f"coordinate {c} vertex {y!r} emits finitely many edges; "
                                "it cannot carry a blocking set")
        for e in bs:
            if not g.has_edge(e) or g.origin(e) != y:
                raise CylinderError(f"blocked edge {e} does not leave {y!r}")


class SetUnion:
    """A finite disjoint union of basic sets."""

    def __init__(self, model: HybridModel, parts: Iterable[BasicSet] = (), check: bool = True):
        self.model = model
        self.parts: tuple[BasicSet, ...] = tuple(parts)
        for p in self.parts:
            validate(model, p)
        if check:
            for i, p in enumerate(self.parts):
                for q in self.parts[i + 1:]:
                    if intersect(model, p, q).parts:
                        raise CylinderError(f"parts {p.label(model)} and {q.label(model)} overlap")

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    @property
    def is_empty_list(self) -> bool:
        return not self.parts

    def labels(self) -> list[str]:
        return [p.label(self.model) for p in self.parts]

    def intersect(self, other: "SetUnion") -> "SetUnion":
        out = []
        for a in self.parts:
            for b in other.parts:
                out += intersect(self.model, a, b).parts
        return SetUnion(self.model, out, check=False)

    def subtract(self, other: "SetUnion") -> "SetUnion":
        cur = list(self.parts)
        for b in other.parts:
            nxt = []
            for a in cur:
                nxt += subtract(self.model, a, b).parts
            cur = nxt
        return SetUnion(self.model, cur, check=False)


# -- patterns ---------------------------------------------------------------


@dataclass(frozen=True)
class Pattern:
    stem: FinitePath
    excluded: frozenset     # one-step extensions of stem


def _steps(model: HybridModel, mu: FinitePath, r: FinitePath) -> list[FinitePath]:
    """Split ``r`` (a path from ``t(mu)``) into one-edge paths, coordinates in order."""
    out = []
    for el in r.elements:
        if isinstance(el, DElement):
            out += [model.d_edge_path(n) for n in el.edges]
        else:
            v = el.origin
            for c, p in enumerate(el.paths):
                for e in p.edges:
                    s = model.block_step(v, c, e)
                    out.append(s)
                    v = s.terminus
    return out


def _step_of(model: HybridModel, stem: FinitePath, ext: FinitePath):
    """Classify a one-step extension: ``("D", name)`` or ``(c, edge)``."""
    r = residual(stem, ext)
    assert r is not None and len(r.elements) == 1
    el = r.elements[0]
    if isinstance(el, DElement):
        assert len(el.edges) == 1
        return ("D", el.edges[0])
    moved = [(c, p.edges[0]) for c, p in enumerate(el.paths) if p.edges]
    assert len(moved) == 1 and len(el.paths[moved[0][0]].edges) == 1
    return moved[0]


def pattern_of(model: HybridModel, a: BasicSet) -> Pattern:
    mu = a.stem
    if a.kind == "Z":
        return Pattern(mu, frozenset())
    t = mu.terminus
    ex = [concat(mu, model.d_edge_path(n)) for n in model.d_exits(t)]
    for c, bs in enumerate(a.blocked):
        ex += [concat(mu, model.block_step(t, c, e)) for e in bs]
    return Pattern(mu, frozenset(ex))


def intersect_patterns(p: Pattern, q: Pattern) -> Pattern | None:
    j = join(p.stem, q.stem)
    if j is None:
        return None
    ex = set()
    for r in p.excluded | q.excluded:
        if is_prefix(r, j):
            return None
        m = join(r, j)
        if m is not None:
            ex.add(m)
    return Pattern(j, frozenset(ex))


def cover(model: HybridModel, pat: Pattern) -> list[BasicSet]:
    """Disjoint basic sets whose union is the pattern's set."""
    j, ex = pat.stem, pat.excluded
    if not ex:
        return [Zset(j)]
    t = j.terminus
    steps = [_step_of(model, j, r) for r in ex]
    if model.is_a_vertex(t):
        gone = {s[1] for s in steps}
        return [Zset(concat(j, model.d_edge_path(n))) for n in model.d_exits(t) if n not in gone]
    d_gone = {s[1] for s in steps if s[0] == "D"}
    blocks = [set() for _ in range(model.rank)]
    for s in steps:
        if s[0] != "D":
            blocks[s[0]].add(s[1])
    for c in range(model.rank):
        if blocks[c] and not model.blocks[t.block][c].is_infinite_emitter(t.coords[c]):
            # finite emitter: the coordinate must move, so split over its edges
            out = []
            for e in model.coordinate_edges(t, c):
                if e in blocks[c]:
                    continue
                nj = concat(j, model.block_step(t, c, e))
                nex = frozenset(m for r in ex if _step_of(model, j, r)[0] not in ("D", c)
                                for m in [join(r, nj)] if m is not None)
                out += cover(model, Pattern(nj, nex))
            return out
    out = [Vset(model, j, blocks)]
    out += [Zset(concat(j, model.d_edge_path(n))) for n in model.d_exits(t) if n not in d_gone]
    return out


def intersect(model: HybridModel, a: BasicSet, b: BasicSet) -> SetUnion:
    p = intersect_patterns(pattern_of(model, a), pattern_of(model, b))
    return SetUnion(model, [] if p is None else cover(model, p), check=False)


def _disjoint_pieces(model: HybridModel, pat: Pattern) -> list[Pattern]:
    """``Z(stem)`` minus the pattern, as disjoint patterns (D exits, then coordinates in order)."""
    j = pat.stem
    by_kind: dict = {}
    for r in sorted(pat.excluded):
        by_kind.setdefault(_step_of(model, j, r)[0], []).append(r)
    out = [Pattern(r, frozenset()) for r in by_kind.get("D", [])]
    earlier: list[FinitePath] = []
    for c in range(model.rank):
        rs = by_kind.get(c, [])
        for r in rs:
            ex = frozenset(m for q in earlier for m in [join(q, r)] if m is not None)
            out.append(Pattern(r, ex))
        earlier += rs
    return out


def subtract(model: HybridModel, a: BasicSet, b: BasicSet) -> SetUnion:
    pa, pb = pattern_of(model, a), pattern_of(model, b)
    j = join(pa.stem, pb.stem)
    if j is None:
        return SetUnion(model, [a], check=False)
    pieces: list[Pattern] = []
    # Z(stem_a) \ Z(j), telescoped along one-step extensions
    chain = [pa.stem]
    for s in _steps(model, pa.stem, residual(pa.stem, j)):
        chain.append(concat(chain[-1], s))
    pieces += [Pattern(x, frozenset({y})) for x, y in zip(chain, chain[1:])]
    # Z(stem_b) \ b
    pieces += _disjoint_pieces(model, pb)
    out = []
    for piece in pieces:
        p = intersect_patterns(pa, piece)
        if p is not None:
            out += cover(model, p)
    return SetUnion(model, out, check=False)


def partition_expand(model: HybridModel, a: BasicSet, blocked: Sequence[Iterable[Edge]] | None = None) -> SetUnion:
    """The standard refinements of ``Z(mu)`` at a gluing vertex and of ``V(mu)``.

    At a gluing vertex with no blocking sets, ``Z(mu)`` splits as ``V(mu)``
    plus the cylinders of its D-exits.  For ``V(mu)`` at a block vertex and
    blocking sets ``B_c``, each piece fixes a blocked first edge in some
    coordinates and forbids the blocked edges in the others.
    """
    validate(model, a)
    mu = a.stem
    t = mu.terminus
    if blocked is None:
        blocked = [()] * model.rank
    bs = [frozenset(tuple(e) for e in b) for b in blocked]
    if a.kind == "V" and any(a.blocked):
        raise CylinderError("refine V(mu) or Z(mu), not an already blocked set")
    if not any(bs):
        if a.kind == "Z" and model.is_u_vertex(t):
            return SetUnion(model, [Vset(model, mu)] + [Zset(concat(mu, model.d_edge_path(n)))
                                                        for n in model.d_exits(t)])
        return SetUnion(model, [a])
    if model.is_a_vertex(t):
        raise CylinderError("blocking sets need a block terminus")
    base = Vset(model, mu, bs)
    validate(model, base)
    if a.kind == "Z" and model.is_u_vertex(t):
        raise CylinderError("refine V(mu) at a gluing vertex; Z(mu) also contains D-exits")
    parts = [base]
    choices = [[None] + sorted(b) for b in bs]
    for pick in product(*choices):
        if all(x is None for x in pick):
            continue
        stem = mu
        for c, e in enumerate(pick):
            if e is not None:
                stem = concat(stem, model.block_step(stem.terminus, c, e))
        ex = []
        for c, e in enumerate(pick):
            if e is None:
                for f in bs[c]:
                    ex.append(concat(stem, model.block_step(stem.terminus, c, f)))
        parts += cover(model, Pattern(stem, frozenset(ex)))
    return SetUnion(model, parts)


# -- the truncation oracle -----------------------------------------------


def required_depth(model: HybridModel, a: BasicSet) -> int:
    """Smallest depth at which ``a`` is a union of atoms."""
    ell = model.length(a.stem)
    need = max(ell, default=0)
    for r in pattern_of(model, a).excluded:
        need = max(need, max(model.length(r)))
    return need


def atom_nonempty(model: HybridModel, rho: FinitePath, depth: int, cap: int) -> bool:
    t = rho.terminus
    ell = model.length(rho)
    if model.is_u_vertex(t):
        return True
    if model.is_a_vertex(t):
        return max(ell) >= depth
    for c, g in enumerate(model.blocks[t.block]):
        y = t.coords[c]
        free = (g.is_infinite_emitter(y) or g.has_edge_beyond(y, cap)
                or (ell[c] >= depth and g.out_degree(y) > 0))
        if not free:
            return False
    return True


def atom_in(model: HybridModel, a: BasicSet, rho: FinitePath, excluded=None) -> bool:
    if not is_prefix(a.stem, rho):
        return False
    if a.kind == "Z":
        return True
    if excluded is None:
        excluded = pattern_of(model, a).excluded
    return not any(is_prefix(r, rho) for r in excluded)


def _check_depth(model: HybridModel, sets: Iterable[BasicSet], depth: int, cap: int) -> None:
    for a in sets:
        if depth < required_depth(model, a):
            raise CylinderError(f"depth {depth} too small for {a.label(model)}")
        for path in (a.stem,):
            for el in path.elements:
                if isinstance(el, BlockElement):
                    if any(i >= cap for p in el.paths for _, i in p.edges):
                        raise CylinderError(f"{a.label(model)} uses an edge beyond cap {cap}")
        for bs in a.blocked:
            if any(i >= cap for _, i in bs):
                raise CylinderError(f"{a.label(model)} blocks an edge beyond cap {cap}")


def truncated_members(model: HybridModel, sets: SetUnion | Iterable[BasicSet],
                      depth: int, cap: int) -> list[TruncatedInfinitePath]:
    """The nonempty atoms lying in the union, in deterministic order."""
    parts = list(sets.parts if isinstance(sets, SetUnion) else sets)
    _check_depth(model, parts, depth, cap)
    found = set()
    for a in parts:
        mu = a.stem
        excluded = pattern_of(model, a).excluded
        rest = tuple(depth - x for x in model.length(mu))
        for r in model.paths_from(mu.terminus, rest, cap):
            rho = concat(mu, r)
            if rho in found:
                continue
            if atom_nonempty(model, rho, depth, cap) and not any(
                    is_prefix(x, rho) for x in excluded):
                found.add(rho)
    return [TruncatedInfinitePath(p, depth, cap) for p in sorted(found)]


def member_paths(model: HybridModel, sets, depth: int, cap: int) -> set[FinitePath]:
    return {x.path for x in truncated_members(model, sets, depth, cap)}


def truncation_atoms(model: HybridModel, origin, depth: int, cap: int) -> list[FinitePath]:
    """All nonempty atoms starting at ``origin``."""
    return [p for p in model.paths_from(origin, (depth,) * model.rank, cap)
            if atom_nonempty(model, p, depth, cap)]


def separate(model: HybridModel, x: TruncatedInfinitePath,
             x2: TruncatedInfinitePath) -> tuple[SetUnion, SetUnion]:
    """Disjoint unions containing ``x`` and ``x2`` respectively."""
    rho, rho2 = x.path, x2.path
    if rho == rho2 or (x.depth, x.cap) != (x2.depth, x2.cap):
        raise CylinderError("truncations are indistinguishable or not comparable")
    if is_prefix(rho, rho2):
        whole = Zset(FinitePath.vertex(rho.origin))
        return subtract(model, whole, Zset(rho2)), SetUnion(model, [Zset(rho2)])
    if is_prefix(rho2, rho):
        whole = Zset(FinitePath.vertex(rho.origin))
        return SetUnion(model, [Zset(rho)]), subtract(model, whole, Zset(rho))
    return SetUnion(model, [Zset(rho)]), subtract(model, Zset(rho2), Zset(rho))
