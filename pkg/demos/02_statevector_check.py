"""
Checking the closed form against a dense statevector
====================================================

For a handful of qubits the whole circuit fits in memory: encode with the
permutation A, apply the N phase gates on the ancillas, decode with A, then
correct the tails. The Choi overlap of that circuit must match the sector
formula to machine precision.
"""
import math

import numpy as np

from superreplication import (
    DenseState,
    apply_protocol_statevector,
    build_permutation_A,
    build_sector_map,
    choi_overlap_bruteforce,
    ideal_action,
    plan_for_budget,
    process_fidelity,
)

config = plan_for_budget(5, 3)
print("config:", config.to_dict())

perm = build_permutation_A(config)
idx = perm.index_map()
print(f"A swaps {len(perm.pairs)} pairs on {perm.total_qubits} qubits; involution: {np.array_equal(idx[idx], np.arange(idx.size))}")

phase_map = build_sector_map(config, "random", seed=1)
for theta in (0.0, 0.3, math.pi / 2, math.pi, 2.5):
    closed = process_fidelity(phase_map, theta)
    brute = choi_overlap_bruteforce(config, "random", 1, theta)
    print(f"theta={theta:6.4f}  closed={closed:.15f}  statevector={brute:.15f}  diff={abs(closed - brute):.1e}")

# a random input that lives mostly in the bulk is replicated almost perfectly
psi = DenseState.random(5, seed=4)
out, residual = apply_protocol_statevector(config, "random", 1, psi, 0.8, return_residual=True)
print(f"\nrandom input: fidelity with U(0.8)^5 = {out.fidelity(ideal_action(psi, 0.8)):.6f}, ancilla residual {residual:.1e}")
