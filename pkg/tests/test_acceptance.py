"""Exit criteria. Each test records one PASS/FAIL line in the terminal summary."""
import math
import time

import numpy as np

from superreplication.cli import main
from superreplication.combinatorics import binomial_weights, bulk_mass, gaussian_bulk_estimate
from superreplication.emulation import QuditEvolution, emulate_qubits_from_qudit, ladder_spec
from superreplication.metrology import (
    bulk_state,
    ghz_state,
    plus_state,
    qfi,
    state_fidelity_under_protocol,
)
from superreplication.oracle import (
    DenseState,
    apply_protocol_statevector,
    build_permutation_A,
    choi_overlap_bruteforce,
    effective_diagonal,
    ideal_action,
    popcount,
)
from superreplication.protocol import (
    average_process_fidelity,
    build_sector_map,
    plan_for_budget,
    plan_replication,
    process_fidelity,
    worst_case_bound,
)

THETAS = (0.0, 0.3, math.pi / 2, math.pi, 2.5)
POLICIES = (("zero", 0), ("random", 1))


def test_ac1_oracle_equivalence(criterion):
    start = time.perf_counter()
    worst = 0.0
    for M in range(2, 7):
        for N in range(1, 5):
            config = plan_for_budget(M, N)
            for policy, seed in POLICIES:
                m = build_sector_map(config, policy, seed)
                for theta in THETAS:
                    diff = abs(process_fidelity(m, theta) - choi_overlap_bruteforce(config, policy, seed, theta))
                    worst = max(worst, diff)
    elapsed = time.perf_counter() - start
    criterion["text"] = f"max |closed - brute| = {worst:.2e} (tol 1e-10), {elapsed:.2f}s (limit 30s)"
    assert worst <= 1e-10
    assert elapsed < 30


def test_ac2_convergence(criterion):
    start = time.perf_counter()
    vals, floors = [], []
    for M in (64, 256, 1024, 4096):
        config = plan_replication(M, 1.0, 0.6)
        vals.append(average_process_fidelity(build_sector_map(config, "random", 0)))
        floors.append(worst_case_bound(config)[1])
    elapsed = time.perf_counter() - start
    criterion["text"] = (
        "avg F = " + ", ".join(f"{v:.8f}" for v in vals) + f"; {elapsed:.2f}s (limit 10s)"
    )
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] >= 0.99
    assert all(v >= f for v, f in zip(vals, floors))
    assert elapsed < 10


def test_ac3_bulk_vs_gaussian(criterion):
    gaps = []
    for M in (256, 1024, 4096):
        half = M**0.6
        b = bulk_mass(M, M / 2 - half, M / 2 + half)
        gaps.append((M, abs(b - gaussian_bulk_estimate(1.0, 0.6, M)), 2 * M**-0.5))
    criterion["text"] = "; ".join(f"M={M}: {g:.2e} <= {t:.2e}" for M, g, t in gaps)
    assert all(g <= t for _, g, t in gaps)


def test_ac4_emulation_exact(criterion):
    worst, calls = 0.0, set()
    for n in range(1, 7):
        for seed in range(8):
            psi = DenseState.random(n, 1000 * n + seed)
            for theta in (0.0, 0.7, math.pi):
                evo = QuditEvolution(ladder_spec(n + 1))
                out = emulate_qubits_from_qudit(n, theta, psi, evolution=evo)
                worst = max(worst, float(np.max(np.abs(out.amplitudes - ideal_action(psi, theta).amplitudes))))
                calls.add(evo.calls)
    criterion["text"] = f"max amplitude error {worst:.2e} (tol 1e-12), V calls per run {sorted(calls)}"
    assert worst <= 1e-12
    assert calls == {1}


def test_ac5_metrology(criterion):
    for M in (2, 4, 8, 16):
        assert qfi(plus_state(M)) == M
        assert qfi(ghz_state(M)) == M * M

    config = plan_for_budget(4, 2)
    m = build_sector_map(config, "zero")
    k = popcount(np.arange(16))
    ghz = DenseState(4, ghz_state(4).sector_amplitudes[k])
    ghz_err = 0.0
    for theta in np.linspace(0, 2 * math.pi, 17):
        expected = math.cos(4 * theta / 2) ** 2
        closed = state_fidelity_under_protocol(ghz_state(4), m, theta)
        brute = apply_protocol_statevector(config, "zero", 0, ghz, theta).fidelity(ideal_action(ghz, theta))
        ghz_err = max(ghz_err, abs(closed - expected), abs(brute - expected))

    rng = np.random.default_rng(2024)
    plus_err = 0.0
    for _ in range(16):
        M = int(rng.integers(1, 600))
        alpha, beta = float(rng.uniform(0.2, 2.0)), float(rng.uniform(0.55, 0.95))
        pm = build_sector_map(plan_replication(M, alpha, beta), "random", int(rng.integers(1 << 31)))
        theta = float(rng.uniform(0, 2 * math.pi))
        plus_err = max(plus_err, abs(state_fidelity_under_protocol(plus_state(M), pm, theta) - process_fidelity(pm, theta)))

    criterion["text"] = f"QFI exact; GHZ cos^2 err {ghz_err:.2e} (tol 1e-10); |+> vs F_E err {plus_err:.2e} (tol 1e-12)"
    assert ghz_err <= 1e-10
    assert plus_err <= 1e-12


def test_ac6_bulk_exactness(criterion):
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(12):
        M = int(rng.integers(2, 800))
        config = plan_replication(M, float(rng.uniform(0.3, 2.0)), float(rng.uniform(0.55, 0.95)))
        size = config.bulk_sectors.size
        state = bulk_state(config, rng.random(size), rng.uniform(0, 2 * math.pi, size))
        m = build_sector_map(config, "random", int(rng.integers(1 << 31)))
        for theta in rng.uniform(0, 2 * math.pi, 16):
            worst = max(worst, abs(1.0 - state_fidelity_under_protocol(state, m, theta)))
    criterion["text"] = f"max |1 - F| = {worst:.2e} (tol 1e-12)"
    assert worst <= 1e-12


def test_ac7_structural(criterion, tmp_path):
    involutive = True
    residual = 0.0
    for M in range(2, 7):
        for N in range(1, 5):
            config = plan_for_budget(M, N)
            perm = build_permutation_A(config).index_map()
            involutive &= bool(np.array_equal(perm[perm], np.arange(perm.size)))
            involutive &= bool(np.array_equal(np.sort(perm), np.arange(perm.size)))
            for policy, seed in POLICIES:
                for theta in THETAS:
                    residual = max(residual, effective_diagonal(config, policy, seed, theta)[1])
                    psi = DenseState.random(M, M + 7 * N)
                    _, r = apply_protocol_statevector(config, policy, seed, psi, theta, return_residual=True)
                    residual = max(residual, r)

    norm_err = max(abs(binomial_weights(M).total() - 1.0) for M in range(1, 1025))

    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "--m", "1024", "--seed", "9", "--theta-count", "32"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    identical = a.read_bytes() == b.read_bytes()

    criterion["text"] = (
        f"involution {involutive}; ancilla residual {residual:.1e} (tol 1e-12); "
        f"norm err {norm_err:.1e} (tol 1e-12); CLI byte-identical {identical}"
    )
    assert involutive
    assert residual <= 1e-12
    assert norm_err <= 1e-12
    assert identical
