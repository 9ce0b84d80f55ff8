"""
Heisenberg scaling without entanglement across uses
===================================================

Probing M replicated copies with a product state gives QFI = M, which for
M ~ N^2 copies matches a GHZ probe that needs all N uses in parallel.
"""
import math

import numpy as np

from superreplication import (
    build_sector_map,
    bulk_state,
    ghz_state,
    plan_for_budget,
    plan_replication,
    plus_state,
    precision_resource_table,
    qfi,
    state_fidelity_under_protocol,
)

for M in (2, 4, 8, 16):
    print(f"M={M:>2}: QFI(plus)={qfi(plus_state(M)):>5.0f}  QFI(GHZ)={qfi(ghz_state(M)):>5.0f}")

# GHZ only sees the two outermost sectors; with both of them in the tails the fidelity is cos^2(M theta / 2)
m = build_sector_map(plan_for_budget(4, 2), "zero")
for theta in np.linspace(0, math.pi / 2, 5):
    f = state_fidelity_under_protocol(ghz_state(4), m, theta)
    print(f"theta={theta:.4f}  GHZ fidelity={f:.6f}  cos^2(2 theta)={math.cos(2 * theta) ** 2:.6f}")

# inputs supported on the bulk sectors are replicated exactly
config = plan_replication(200, 1.0, 0.6)
s = bulk_state(config)
m = build_sector_map(config, "random", 3)
print("\nbulk input, worst fidelity:", min(state_fidelity_under_protocol(s, m, t) for t in np.linspace(0, 6.28, 50)))

print()
for N in (4, 16, 64):
    t = precision_resource_table(N, 1.0, 0.6)
    print(t.to_dict())
