"""Paths in a hybrid model and the ring of cylinder sets.

Two blocks of (Linf x Linf) sit on a chain joined by connecting edges.
Block paths commute across coordinates; connecting edges have length
(1, 1).  Intersections and differences of cylinder sets come back as
disjoint unions of basic sets, which we check against brute-force
membership of truncated paths.
"""

from kirchberg.cylinders import Vset, Zset, intersect, member_paths, subtract
from kirchberg.model import join
from kirchberg.suites import linf_pair_model

m = linf_pair_model()
u = m.u[0]
e, f = (0, 0), (0, 1)

p = m.path(u, [(0, e), (1, f)])
q = m.path(u, [(1, f), (0, e)])
print(f"square: {m.path_label(p)} == {m.path_label(q)}? {p == q}, length {m.length(p)}")

d = m.path(u, ["epsilon0", "beta0", "delta0"])
print(f"through the connecting graph: {m.path_label(d)}, length {m.length(d)}")

a, b = m.path(u, [(0, e)]), m.path(u, [(1, f)])
print(f"join of {m.path_label(a)} and {m.path_label(b)}: {m.path_label(join(a, b))}")

A = Zset(m.path(u, [(0, e)]))
B = Zset(m.path(u, [(1, f)]))
inter, diff = intersect(m, A, B), subtract(m, A, B)
print(f"\n{A.label(m)} & {B.label(m)} = {inter.labels()}")
print(f"{A.label(m)} - {B.label(m)} = {diff.labels()}")

depth, cap = 4, 2
ma, mb = member_paths(m, [A], depth, cap), member_paths(m, [B], depth, cap)
print(f"oracle at depth {depth}: intersection {member_paths(m, inter, depth, cap) == ma & mb}, "
      f"difference {member_paths(m, diff, depth, cap) == ma - mb}")

# blocking edges: V(u; {e}) is everything from u that does not start with e
C = Vset(m, m.path(u, []), [[e], []])
print(f"\nZ(u) - {C.label(m)} = {subtract(m, Zset(m.path(u, [])), C).labels()}")
