import math
from collections import Counter

import numpy as np
import pytest

from superreplication.emulation import (
    QuditEvolution,
    QuditSpec,
    bang_bang_effective_spectrum,
    copies_for_budget,
    emulate_qubits_from_qudit,
    ladder_spec,
    min_ancilla_count,
    sector_routing,
    single_use_super_replication,
)
from superreplication.errors import DomainError, UnsupportedScaleError
from superreplication.oracle import DenseState, ideal_action
from superreplication.protocol import build_sector_map, process_fidelity


def direct_phase_gate(state, theta):
    """Apply U(theta) qubit by qubit as a Kronecker product of 2x2 diagonals."""
    u = np.array([1.0, np.exp(-1j * theta)])
    full = np.array([1.0 + 0j])
    for _ in range(state.qubit_count):
        full = np.kron(full, u)
    return full * state.amplitudes


class TestAncillas:
    @pytest.mark.parametrize("n,aux", [(1, 0), (2, 1), (3, 2), (4, 3), (6, 5), (8, 7)])
    def test_values(self, n, aux):
        assert min_ancilla_count(n) == aux

    @pytest.mark.parametrize("n", range(1, 30))
    def test_minimal(self, n):
        aux = min_ancilla_count(n)
        big = math.comb(n, n // 2)
        assert 2**aux >= big
        assert aux == 0 or 2 ** (aux - 1) < big


class TestRouting:
    @pytest.mark.parametrize("n", range(1, 9))
    def test_injective(self, n):
        level, rank = sector_routing(n)
        pairs = set(zip(level.tolist(), rank.tolist()))
        assert len(pairs) == 1 << n
        assert rank.max() < 2 ** min_ancilla_count(n)

    def test_lexicographic(self):
        level, rank = sector_routing(3)
        # weight-1 states 001, 010, 100 in that order
        assert [rank[i] for i in (1, 2, 4)] == [0, 1, 2]


class TestEmulate:
    def test_identity(self):
        psi = DenseState.random(4, 1)
        out = emulate_qubits_from_qudit(4, 0.0, psi)
        np.testing.assert_allclose(out.amplitudes, psi.amplitudes, atol=0)

    def test_single_qubit(self):
        psi = DenseState.random(1, 2)
        out = emulate_qubits_from_qudit(1, 0.9, psi)
        u = np.diag([1.0, np.exp(-0.9j)])
        np.testing.assert_allclose(out.amplitudes, u @ psi.amplitudes, atol=1e-15)

    def test_n6_against_kron(self):
        psi = DenseState.random(6, 77)
        out = emulate_qubits_from_qudit(6, 0.7, psi)
        np.testing.assert_allclose(out.amplitudes, direct_phase_gate(psi, 0.7), atol=1e-12)

    @pytest.mark.parametrize("n", range(1, 9))
    def test_single_invocation(self, n):
        evo = QuditEvolution(ladder_spec(n + 1))
        emulate_qubits_from_qudit(n, 1.1, DenseState.random(n, n), evolution=evo)
        assert evo.calls == 1

    def test_rescaled_ladder(self):
        psi = DenseState.random(5, 3)
        out = emulate_qubits_from_qudit(5, 2.0, psi, spec=ladder_spec(6, 0.25))
        np.testing.assert_allclose(out.amplitudes, ideal_action(psi, 0.5).amplitudes, atol=1e-12)

    def test_too_few_levels(self):
        with pytest.raises(DomainError):
            emulate_qubits_from_qudit(3, 1.0, DenseState.random(3, 0), spec=ladder_spec(3))

    def test_uneven_spectrum(self):
        with pytest.raises(DomainError):
            emulate_qubits_from_qudit(2, 1.0, DenseState.random(2, 0), spec=QuditSpec(3, (0, 1, 3)))

    def test_scale_cap(self):
        with pytest.raises(UnsupportedScaleError):
            emulate_qubits_from_qudit(13, 1.0, DenseState.random(13, 0))

    @pytest.mark.parametrize("n", range(1, 9))
    def test_spectrum_covers_qubit_spectrum(self, n):
        aux = min_ancilla_count(n)
        v_diag = np.kron(np.array(ladder_spec(n + 1).eigenvalues), np.ones(2**aux))
        qudit = Counter(v_diag.round(12).tolist())
        qubits = Counter(float(bin(s).count("1")) for s in range(2**n))
        for eig, mult in qubits.items():
            assert qudit[eig] >= mult
        assert set(qudit) == set(qubits)


class TestBangBang:
    def test_values(self):
        assert bang_bang_effective_spectrum(1).eigenvalues == (0.0,)
        assert bang_bang_effective_spectrum(2).eigenvalues == (0.0, 0.5)
        np.testing.assert_allclose(bang_bang_effective_spectrum(5).eigenvalues, [0, 0.2, 0.4, 0.6, 0.8])

    def test_is_rescaled_ladder(self):
        spec = bang_bang_effective_spectrum(7)
        assert spec.ladder_scale() == pytest.approx(1 / 7)


class TestSingleUse:
    def test_budget_solver(self):
        for n in range(2, 60):
            M, slack = copies_for_budget(n, 1.0, 0.6)
            assert math.ceil(2 * M**0.6) <= n < math.ceil(2 * (M + 1) ** 0.6) or M == 1
            assert slack == n - math.ceil(2 * M**0.6)

    def test_tiny_is_exact(self):
        r = single_use_super_replication(2, 1.0, 0.6, 1.3)
        assert r.config.M == 1
        assert r.report.process_fidelity == pytest.approx(1.0, abs=1e-14)

    def test_n8_compositional(self):
        r = single_use_super_replication(8, 1.0, 0.6, 1.0, "random", 0)
        assert r.config.N == 8 and r.config.M == 10 and r.slack == 0
        assert r.emulation_exact
        m = build_sector_map(r.config, "random", 0)
        assert r.report.process_fidelity == pytest.approx(process_fidelity(m, 1.0 / 8), abs=1e-15)

    def test_trend(self):
        vals = [single_use_super_replication(n, 1.0, 0.6, 1.0).report.process_fidelity for n in (8, 16, 32)]
        assert vals[0] < vals[1] < vals[2]
        assert vals[2] > 0.99

    def test_domain(self):
        with pytest.raises(DomainError):
            single_use_super_replication(1, 1.0, 0.6, 1.0)
