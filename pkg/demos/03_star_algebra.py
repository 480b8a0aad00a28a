"""The symbolic *-algebra.

Elements are integer combinations of S_mu S_nu^*, kept in a normal form
that never ends a term in the special edge of a vertex satisfying the
Cuntz-Krieger relation.  Every rewrite is checked against the action of
terms as partial maps on paths.
"""

from kirchberg.algebra import AlgebraElement, HybridSystem, reduce_star
from kirchberg.oracles import star_map_mismatches
from kirchberg.suites import linf_pair_model

m = linf_pair_model()
s = HybridSystem(m)
u, a = m.u[0], m.a_vertices[0]
e, f = (0, 0), (0, 1)

x, y = m.path(u, [(0, e)]), m.path(u, [(1, f)])
r = reduce_star(m, x, y)
print(f"S_x* S_y with x = {m.path_label(x)}, y = {m.path_label(y)}: {r.kind}, "
      f"S_{m.path_label(r.a)} S_{m.path_label(r.b)}*")
print(f"  partial-map oracle disagreements: {len(star_map_mismatches(m, x, y, r, 2, 3))}")

beta = m.d_edge_path("beta0")
pb = AlgebraElement.range_projection(s, beta)
print(f"\nS_beta S_beta* in normal form ({len(pb)} terms):\n  {pb}")

total = AlgebraElement.zero(s)
for n in m.d_exits(a):
    total = total + AlgebraElement.range_projection(s, m.d_edge_path(n))
print(f"sum of range projections at {a.label()} equals P_a: {total == AlgebraElement.projection(s, a)}")

t = AlgebraElement.term(s, x, m.path(u, [(0, f)]))
print(f"\nt = {t}\nt t* t == t: {t * t.adjoint() * t == t}")
