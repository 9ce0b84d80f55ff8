"""
n qubit phase gates from a single use of one qudit gate
=======================================================

A qudit with an evenly spaced spectrum 0, 1, ..., n can stand in for
U(theta) on n qubits: route each basis state to the level equal to its
Hamming weight, park its rank on a few ancillas, apply the qudit gate once
and route back.
"""
import numpy as np

from superreplication import (
    DenseState,
    QuditEvolution,
    emulate_qubits_from_qudit,
    ideal_action,
    ladder_spec,
    min_ancilla_count,
    single_use_super_replication,
)

for n in range(1, 9):
    psi = DenseState.random(n, seed=n)
    evo = QuditEvolution(ladder_spec(n + 1))
    out = emulate_qubits_from_qudit(n, 0.7, psi, evolution=evo)
    err = np.max(np.abs(out.amplitudes - ideal_action(psi, 0.7).amplitudes))
    print(f"n={n}: ancillas={min_ancilla_count(n)}  qudit calls={evo.calls}  max error={err:.1e}")

# combining the two: one use of an n-level gate gives ~ (n/2)^(1/beta) copies of U(theta/n)
print()
for n in (8, 16, 32, 64):
    r = single_use_super_replication(n, 1.0, 0.6, theta=1.0, seed=0)
    print(f"n={n:>3}: M={r.config.M:>4} copies of U(1/{n}), process fidelity {r.report.process_fidelity:.6f}")
