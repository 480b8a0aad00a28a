"""Inside the AF core.

At level k the degree-zero part of a truncation decomposes into minimal
projections theta, one equivalence class per label (kind, length,
terminus).  The classes form one level of a Bratteli diagram; the
inclusion from the block side is unitriangular.
"""

from kirchberg.afcore import (Truncation, bratteli, census, inclusion_triangularity, label_text,
                              o2_identity, partition_check, thetas)
from kirchberg.suites import linf_pair_model

m = linf_pair_model()
for k in (1, 2):
    tr = Truncation(m, k, 2)
    ths = thetas(tr)
    rep = partition_check(tr, ths)
    print(f"level {k}: {len(ths)} projections, census {census(ths)}, checks pass: {rep.ok}")

tr = Truncation(m, 1, 2)
for th in thetas(tr)[:4]:
    print(f"  {label_text(th.label)}: {th.describe(m)}")

level, rep = bratteli(tr, Truncation(m, 2, 2))
print(f"\nBratteli level 1 -> 2: {len(level.classes)} -> {len(level.next_classes)} classes, "
      f"{len(level.edges)} edges, conserved: {rep.ok}")
print("\n".join(level.to_dot().splitlines()[:6]) + "\n  ...")

tri = inclusion_triangularity(tr)
print(f"\ninclusion matrix lower unitriangular: {tri.ok}, determinant {tri.details['determinant']}")
for n in range(4):
    r = o2_identity(m, n)
    print(f"O2 bookkeeping at m={n}: {r.ok}  {r.details.get('relation', '')}")
