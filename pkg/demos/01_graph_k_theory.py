"""K-theory of single graphs.

For a graph with regular vertices R, K0 is the cokernel and K1 the kernel
of (A_R^t - I) restricted to R.  We print the Cuntz graphs, the single
infinite emitter, and a small graph with a sink.
"""

from kirchberg.graphs import INF, DirectedGraph, cuntz_graph, regular_adjacency
from kirchberg.ktheory import graph_k

print("Cuntz graphs: n+1 loops on one vertex give K0 = Z/n")
for n in range(1, 7):
    g = cuntz_graph(n + 1)
    print(f"  {g.name}: {graph_k(g)}")

lin = cuntz_graph(INF)
print(f"\nOne vertex with infinitely many loops is singular, so nothing is killed:\n  {graph_k(lin)}")

g = DirectedGraph.from_edges("ring", ["a", "b", "c"],
                             [("a", "b", 2), ("b", "a", 1), ("b", "c", 1)])
adj = regular_adjacency(g)
print(f"\n{g.name}: regular rows {adj.rows}, adjacency\n{adj.entries}")
print(f"  {graph_k(g)}  (c is a sink and contributes a free summand)")
