"""Brute-force statevector check of the replication circuit.

The circuit is A^dagger (1^{(x)M} (x) U(theta)^{(x)N}) A acting on M system
qubits followed by N ancillas prepared in |0...0>. Basis indices put the
system qubits first and count qubits most-significant-first, so the joint
index of |s>|r> is ``(s << N) | r``.

The permutation A only moves states of the form |s>|0...0> with |s| in the
bulk: each is swapped with |s>|0^{N-m} 1^m>, m = |s| - k_offset. Sectors
with m = 0 stay put. Everything else is left alone, which is the simplest
unitary completion.

Bulk membership and offsets are recomputed here from the window endpoints
rather than read from a ``SectorPhaseMap``; only the static phases gamma_k
(a seeded random draw) are shared with the closed-form side.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError, UnsupportedScaleError
from .protocol import GammaPolicy, ReplicationConfig, build_sector_map

__all__ = [
    "MAX_TOTAL_QUBITS",
    "MAX_CHOI_SYSTEM_QUBITS",
    "DenseState",
    "PermutationSpec",
    "popcount",
    "build_permutation_A",
    "apply_protocol_statevector",
    "effective_diagonal",
    "choi_overlap_bruteforce",
    "ideal_action",
]

MAX_TOTAL_QUBITS = 20
MAX_CHOI_SYSTEM_QUBITS = 12
_NORM_TOL = 1e-10
_RESIDUAL_TOL = 1e-10
# bound on amplitudes held at once when batching basis inputs
_BATCH_AMPLITUDES = 1 << 22


def popcount(indices: np.ndarray) -> np.ndarray:
    """Hamming weight of each non-negative integer in ``indices``."""
    x = np.asarray(indices, dtype=np.uint64)
    counts = np.zeros(x.shape, dtype=np.int64)
    while np.any(x):
        counts += (x & np.uint64(1)).astype(np.int64)
        x = x >> np.uint64(1)
    return counts


@dataclass(frozen=True)
class DenseState:
    qubit_count: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if self.qubit_count < 0 or self.qubit_count > MAX_TOTAL_QUBITS:
            raise UnsupportedScaleError(f"dense states are capped at {MAX_TOTAL_QUBITS} qubits")
        if amps.shape != (1 << self.qubit_count,):
            raise DomainError(
                f"expected {1 << self.qubit_count} amplitudes, got shape {amps.shape}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > _NORM_TOL:
            raise DomainError(f"state is not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, qubit_count: int, index: int) -> "DenseState":
        amps = np.zeros(1 << qubit_count, dtype=complex)
        amps[index] = 1.0
        return cls(qubit_count, amps)

    @classmethod
    def random(cls, qubit_count: int, seed: int) -> "DenseState":
        rng = np.random.default_rng(seed)
        dim = 1 << qubit_count
        amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return cls(qubit_count, amps / np.linalg.norm(amps))

    def fidelity(self, other: "DenseState") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


@dataclass(frozen=True)
class PermutationSpec:
    """Basis-state transpositions on ``total_qubits`` qubits.

    ``pairs`` is an (P, 2) integer array; every row swaps two basis indices.
    """

    total_qubits: int
    pairs: np.ndarray

    def index_map(self) -> np.ndarray:
        """Full permutation of basis indices as an array ``perm[i] = A(i)``."""
        perm = np.arange(1 << self.total_qubits, dtype=np.int64)
        if len(self.pairs):
            perm[self.pairs[:, 0]] = self.pairs[:, 1]
            perm[self.pairs[:, 1]] = self.pairs[:, 0]
        return perm

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """Apply A along the last axis of ``amplitudes``."""
        # A is a product of disjoint transpositions, so A = A^dagger = A^{-1}
        # and (A psi)[perm[i]] = psi[i] is the same as psi[perm].
        return amplitudes[..., self.index_map()]


def _require_scale(config: ReplicationConfig) -> None:
    if config.M + config.N > MAX_TOTAL_QUBITS:
        raise UnsupportedScaleError(
            f"M + N = {config.M + config.N} exceeds the oracle cap of {MAX_TOTAL_QUBITS} qubits"
        )


def _offsets(config: ReplicationConfig) -> dict[int, int]:
    """Ancilla excitation m for every bulk Hamming weight."""
    ks = [k for k in range(config.M + 1) if config.k_minus < k < config.k_plus]
    if not ks:
        return {}
    k0 = min(ks)
    return {k: k - k0 for k in ks}


def build_permutation_A(config: ReplicationConfig) -> PermutationSpec:
    """Transpositions |s>|0...0> <-> |s>|0^{N-m} 1^m> for bulk s with m >= 1."""
    _require_scale(config)
    M, N = config.M, config.N
    offsets = _offsets(config)
    systems = np.arange(1 << M, dtype=np.int64)
    weights = popcount(systems)
    pairs = []
    for k, m in offsets.items():
        if m == 0:
            continue
        if m > N:
            raise ConsistencyError(f"sector {k} needs {m} ancilla excitations but N = {N}")
        s = systems[weights == k]
        src = s << N
        dst = src | ((1 << m) - 1)
        pairs.append(np.stack([src, dst], axis=1))
    arr = np.concatenate(pairs) if pairs else np.empty((0, 2), dtype=np.int64)
    return PermutationSpec(total_qubits=M + N, pairs=arr)


def _static_phases(config: ReplicationConfig, gamma_policy, seed: int) -> np.ndarray:
    return build_sector_map(config, gamma_policy, seed).gamma


def _run_circuit(
    config: ReplicationConfig,
    perm: PermutationSpec,
    gamma: np.ndarray,
    inputs: np.ndarray,
    theta: float,
) -> tuple[np.ndarray, float]:
    """Run the circuit on a batch of M-qubit input rows.

    Returns the M-qubit outputs and the largest ancilla residual norm.
    """
    M, N = config.M, config.N
    batch = inputs.shape[0]
    joint = np.zeros((batch, 1 << (M + N)), dtype=complex)
    joint[:, ::(1 << N)] = inputs
    joint = perm.apply(joint)
    anc_weight = popcount(np.arange(1 << (M + N)) & ((1 << N) - 1))
    joint = joint * np.exp(-1j * theta * anc_weight)
    joint = perm.apply(joint)

    grid = joint.reshape(batch, 1 << M, 1 << N)
    out = grid[:, :, 0].copy()
    leak = grid[:, :, 1:]
    residual = float(np.sqrt(np.max(np.sum(np.abs(leak) ** 2, axis=(1, 2))))) if N else 0.0
    if residual > _RESIDUAL_TOL:
        raise ConsistencyError(f"ancilla register not restored: residual norm {residual:.3e}")

    sys_weight = popcount(np.arange(1 << M))
    out *= np.exp(-1j * gamma[sys_weight])
    return out, residual


def apply_protocol_statevector(
    config: ReplicationConfig,
    gamma_policy: GammaPolicy | str,
    seed: int,
    state: DenseState,
    theta: float,
    *,
    return_residual: bool = False,
):
    """Embed ``state`` with N ancillas, run A, U^{(x)N} on the ancillas, A^dagger.

    The static phases of the chosen policy are applied to non-bulk sectors
    after the ancillas are discarded.

    Raises:
        ConsistencyError: the ancillas did not return to |0...0>.
    """
    _require_scale(config)
    if state.qubit_count != config.M:
        raise DomainError(f"input has {state.qubit_count} qubits, config has M = {config.M}")
    perm = build_permutation_A(config)
    gamma = _static_phases(config, gamma_policy, seed)
    out, residual = _run_circuit(config, perm, gamma, state.amplitudes[None, :], float(theta))
    result = DenseState(config.M, out[0])
    return (result, residual) if return_residual else result


def effective_diagonal(
    config: ReplicationConfig, gamma_policy: GammaPolicy | str, seed: int, theta: float
) -> tuple[np.ndarray, float]:
    """Diagonal of the realized M-qubit operation, one basis input at a time.

    Each computational basis state is pushed through the circuit; the output
    must be the same basis state times a phase. Returns the phases and the
    largest ancilla residual seen.

    Raises:
        ConsistencyError: some basis input leaked into another basis state.
    """
    _require_scale(config)
    M, N = config.M, config.N
    perm = build_permutation_A(config)
    gamma = _static_phases(config, gamma_policy, seed)
    dim = 1 << M
    chunk = max(1, _BATCH_AMPLITUDES >> (M + N))
    diag = np.empty(dim, dtype=complex)
    worst = 0.0
    for start in range(0, dim, chunk):
        stop = min(dim, start + chunk)
        idx = np.arange(start, stop)
        inputs = np.zeros((stop - start, dim), dtype=complex)
        inputs[np.arange(stop - start), idx] = 1.0
        out, residual = _run_circuit(config, perm, gamma, inputs, float(theta))
        worst = max(worst, residual)
        d = out[np.arange(stop - start), idx]
        off = out.copy()
        off[np.arange(stop - start), idx] = 0.0
        if np.max(np.abs(off)) > _RESIDUAL_TOL or np.max(np.abs(np.abs(d) - 1.0)) > _RESIDUAL_TOL:
            raise ConsistencyError("realized operation is not diagonal with unit-modulus phases")
        diag[start:stop] = d
    return diag, worst


def choi_overlap_bruteforce(
    config: ReplicationConfig, gamma_policy: GammaPolicy | str, seed: int, theta: float
) -> float:
    """|<psi_V|psi_U>|^2 for the Choi states of the simulated and ideal operations.

    Both operations are diagonal, so with |Phi> = 2^{-M/2} sum_s |s>|s> the
    overlap is 2^{-M} sum_s conj(V_ss) exp(-i |s| theta).
    """
    if config.M > MAX_CHOI_SYSTEM_QUBITS:
        raise UnsupportedScaleError(
            f"Choi overlap is capped at M <= {MAX_CHOI_SYSTEM_QUBITS} system qubits"
        )
    diag, _ = effective_diagonal(config, gamma_policy, seed, theta)
    ideal = np.exp(-1j * theta * popcount(np.arange(1 << config.M)))
    terms = np.conj(diag) * ideal
    scale = math.ldexp(1.0, -config.M)
    re = math.fsum(terms.real) * scale
    im = math.fsum(terms.imag) * scale
    return re * re + im * im


def ideal_action(state: DenseState, theta: float) -> DenseState:
    """U(theta)^{(x)n} applied directly: phase exp(-i |s| theta) on basis state s."""
    w = popcount(np.arange(1 << state.qubit_count))
    return DenseState(state.qubit_count, state.amplitudes * np.exp(-1j * theta * w))
