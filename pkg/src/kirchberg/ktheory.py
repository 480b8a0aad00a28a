"""Exact K-theory: finitely generated abelian groups, Smith normal form,
graph K-groups, the Kunneth formula and the block-sum formula for models.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from pathlib import Path
from typing import Iterable, Sequence

from sympy import Matrix, ZZ, factorint
from sympy.matrices.normalforms import smith_normal_decomp

from .graphs import DirectedGraph, regular_adjacency


class KTheoryError(ValueError):
    pass


def smith_normal_form(m) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(D, U, V)`` with ``U*M*V == D`` diagonal, divisibility chain, ``U, V`` unimodular."""
    m = Matrix(m)
    rows, cols = m.shape
    if rows == 0 or cols == 0 or m.is_zero_matrix:
        return Matrix.zeros(rows, cols), Matrix.eye(rows), Matrix.eye(cols)
    d, u, v = smith_normal_decomp(m, domain=ZZ)
    # normalize signs so the diagonal is non-negative
    for i in range(min(rows, cols)):
        if d[i, i] < 0:
            d[i, i] = -d[i, i]
            u[i, :] = -u[i, :]
    return d, u, v


@lru_cache(maxsize=None)
def _factor(n: int) -> tuple:
    return tuple(factorint(n).items())


def _diagonal(d: Matrix) -> list[int]:
    return [int(d[i, i]) for i in range(min(d.shape))]


@dataclass(frozen=True, order=True)
class FgAbelianGroup:
    """``Z^free_rank`` plus cyclic factors ``d1 | d2 | ...`` (each at least 2)."""

    free_rank: int = 0
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise KTheoryError("negative free rank")
        fs = self.invariant_factors
        if any(d < 2 for d in fs) or any(b % a for a, b in zip(fs, fs[1:])):
            raise KTheoryError(f"not an invariant-factor chain: {fs}")

    @classmethod
    def from_cyclics(cls, free_rank: int, orders: Iterable[int]) -> "FgAbelianGroup":
        """Canonical form of ``Z^free_rank (+) sum Z/n`` for arbitrary ``n`` (0 meaning Z)."""
        orders = [abs(int(n)) for n in orders]
        free_rank += sum(1 for n in orders if n == 0)
        orders = [n for n in orders if n > 1]
        if not orders:
            return cls(free_rank, ())
        # a diagonal matrix needs no Smith reduction: collect prime powers and
        # multiply the largest of each prime together, then the next largest...
        powers: dict = {}
        for n in orders:
            for p, e in _factor(n):
                powers.setdefault(p, []).append(p ** e)
        chain = [1] * max(len(v) for v in powers.values())
        for v in powers.values():
            v.sort(reverse=True)
            for i, q in enumerate(v):
                chain[i] *= q
        return cls(free_rank, tuple(reversed(chain)))

    def cyclic_orders(self) -> list[int]:
        """Summands as orders, 0 for each copy of Z."""
        return [0] * self.free_rank + list(self.invariant_factors)

    def __add__(self, other: "FgAbelianGroup") -> "FgAbelianGroup":
        return FgAbelianGroup.from_cyclics(self.free_rank + other.free_rank,
                                           self.invariant_factors + other.invariant_factors)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def render(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.invariant_factors]
        return " (+) ".join(parts) if parts else "0"

    __str__ = render

    @classmethod
    def parse(cls, text: str) -> "FgAbelianGroup":
        text = text.strip()
        if text == "0":
            return cls()
        free, orders = 0, []
        for part in text.split("(+)"):
            part = part.strip()
            m = re.fullmatch(r"Z(?:\^(\d+))?", part)
            if m:
                free += int(m.group(1) or 1)
                continue
            m = re.fullmatch(r"Z/(\d+)", part)
            if m:
                orders.append(int(m.group(1)))
                continue
            raise KTheoryError(f"cannot parse group summand {part!r}")
        return cls.from_cyclics(free, orders)


ZERO = FgAbelianGroup()
Z = FgAbelianGroup(1)


@dataclass(frozen=True, order=True)
class GradedK:
    k0: FgAbelianGroup = field(default_factory=FgAbelianGroup)
    k1: FgAbelianGroup = field(default_factory=FgAbelianGroup)

    def __add__(self, other: "GradedK") -> "GradedK":
        return GradedK(self.k0 + other.k0, self.k1 + other.k1)

    def render(self) -> str:
        return f"K0 = {self.k0.render()}, K1 = {self.k1.render()}"

    __str__ = render

    def pair(self) -> str:
        return f"({self.k0.render()}, {self.k1.render()})"

    @classmethod
    def parse(cls, text: str) -> "GradedK":
        """Parse ``"(G, H)"`` or ``"K0 = G, K1 = H"``."""
        t = text.strip()
        m = re.fullmatch(r"K0\s*=\s*(.+?)\s*,\s*K1\s*=\s*(.+)", t)
        if m:
            return cls(FgAbelianGroup.parse(m.group(1)), FgAbelianGroup.parse(m.group(2)))
        if t.startswith("(") and t.endswith(")"):
            parts = t[1:-1].split(",")
            if len(parts) == 2:
                return cls(FgAbelianGroup.parse(parts[0]), FgAbelianGroup.parse(parts[1]))
        raise KTheoryError(f"cannot parse K-theory pair {text!r}")


def graph_k(g: DirectedGraph) -> GradedK:
    """K-groups of the graph algebra of a graph with finitely many vertices.

    With ``A`` the regular-row adjacency matrix, the map
    ``Z^regular -> Z^vertices`` sends ``e_v`` to ``e_v - sum_w A[v,w] e_w``;
    K0 is its cokernel and K1 its kernel.
    """
    adj = regular_adjacency(g)
    n_all = len(adj.cols)
    idx = {v: j for j, v in enumerate(adj.cols)}
    cols = []
    for r, v in enumerate(adj.rows):
        col = [-int(x) for x in adj.entries[r]]
        col[idx[v]] += 1
        cols.append(col)
    n_reg = len(cols)
    if n_reg == 0:
        return GradedK(FgAbelianGroup(n_all), ZERO)
    m = Matrix(n_all, n_reg, lambda i, j: cols[j][i])
    d, _, _ = smith_normal_form(m)
    diag = _diagonal(d)
    nonzero = [x for x in diag if x != 0]
    rank = len(nonzero)
    k0 = FgAbelianGroup.from_cyclics(n_all - rank, nonzero)
    k1 = FgAbelianGroup(n_reg - rank)
    return GradedK(k0, k1)


def tensor_tor(g: FgAbelianGroup, h: FgAbelianGroup) -> tuple[FgAbelianGroup, FgAbelianGroup]:
    """``(G (x) H, Tor(G, H))`` computed summand by summand."""
    ten_free, ten, tor = 0, [], []
    for a in g.cyclic_orders():
        for b in h.cyclic_orders():
            if a == 0 and b == 0:
                ten_free += 1
            elif a == 0 or b == 0:
                ten.append(a or b)
            else:
                ten.append(gcd(a, b))
                tor.append(gcd(a, b))
    return FgAbelianGroup.from_cyclics(ten_free, ten), FgAbelianGroup.from_cyclics(0, tor)


def kunneth(a: GradedK, b: GradedK) -> GradedK:
    """K-theory of a tensor product, with the Kunneth sequence taken as split."""
    t00, r00 = tensor_tor(a.k0, b.k0)
    t11, r11 = tensor_tor(a.k1, b.k1)
    t01, r01 = tensor_tor(a.k0, b.k1)
    t10, r10 = tensor_tor(a.k1, b.k0)
    return GradedK(t00 + t11 + r01 + r10, t01 + t10 + r00 + r11)


def kunneth_all(ks: Sequence[GradedK]) -> GradedK:
    out = GradedK(Z, ZERO)
    for k in ks:
        out = kunneth(out, k)
    return out


@dataclass(frozen=True)
class KAnnotation:
    graph: str
    k: GradedK
    provenance: str = ""


def graph_k_annotated(g: DirectedGraph, annotations: dict[str, KAnnotation]) -> GradedK:
    ann = annotations.get(g.name)
    if g.fragment:
        if ann is None:
            raise KTheoryError(f"graph {g.name} is a finite fragment of an infinite graph "
                               "and carries no K-theory annotation")
        return ann.k
    computed = graph_k(g)
    if ann is not None and ann.k != computed:
        raise KTheoryError(f"annotation for {g.name} asserts {ann.k.pair()} but the graph "
                           f"computes to {computed.pair()}")
    return computed


def model_k(model, annotations: Iterable[KAnnotation] = ()) -> GradedK:
    """Direct sum over blocks of the Kunneth product of the block graphs' K-groups."""
    if model is None:
        return GradedK()
    ann = {a.graph: a for a in annotations}
    total = GradedK()
    for block in model.blocks:
        total = total + kunneth_all([graph_k_annotated(g, ann) for g in block])
    return total


def class_shift(label: tuple, sigma, model) -> tuple:
    """Transport a class label ``(kind, length, terminus)`` along ``sigma``.

    ``[S_mu S_mu^*]`` goes to ``[S_{sigma mu} S_{sigma mu}^*]``: the length
    grows by ``length(sigma)`` and the terminus is unchanged.  The label
    must start where ``sigma`` ends, which is recorded as its fourth entry.
    """
    kind, ell, term, origin = label
    if sigma.terminus != origin:
        raise KTheoryError("shift path does not end at the origin of the class")
    s = model.length(sigma)
    return (kind, tuple(a + b for a, b in zip(ell, s)), term, sigma.origin)


def annotations_to_data(annotations: Iterable[KAnnotation]) -> list[dict]:
    return [{"graph": a.graph, "k0": a.k.k0.render(), "k1": a.k.k1.render(),
             "provenance": a.provenance} for a in annotations]


def annotations_from_data(items, where: str = "annotations") -> list[KAnnotation]:
    out = []
    for i, d in enumerate(items or ()):
        try:
            k = GradedK(FgAbelianGroup.parse(d["k0"]), FgAbelianGroup.parse(d["k1"]))
            out.append(KAnnotation(d["graph"], k, d.get("provenance", "")))
        except (KeyError, TypeError) as exc:
            raise KTheoryError(f"{where}[{i}]: malformed annotation ({exc})") from exc
    return out


def load_annotations(path) -> list[KAnnotation]:
    """The ``annotations`` list of a model file (empty when absent)."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise KTheoryError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise KTheoryError(f"{path}: a model file holds a single record")
    return annotations_from_data(data.get("annotations"), f"{path}: annotations")
