"""Emulating many qubit phase gates with one qudit evolution.

A single qudit evolution V(theta) = exp(-i theta H_V) with the ladder
spectrum 0, 1, ..., n carries every distinct eigenvalue of U(theta)^{(x)n}.
Routing each n-qubit basis state of weight k to qudit level k, with its
position inside the weight-k sector stored on ancilla qubits, reproduces
U(theta)^{(x)n} exactly after one application of V.

Bang-bang control is modelled only through the effective spectrum it
produces (levels j/n), i.e. the same ladder evolved for theta/n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UnsupportedScaleError
from .oracle import DenseState, popcount
from .protocol import (
    FidelityReport,
    GammaPolicy,
    ReplicationConfig,
    build_sector_map,
    fidelity_report,
)

__all__ = [
    "MAX_EMULATED_QUBITS",
    "QuditSpec",
    "QuditEvolution",
    "ladder_spec",
    "min_ancilla_count",
    "sector_routing",
    "emulate_qubits_from_qudit",
    "bang_bang_effective_spectrum",
    "SingleUseResult",
    "copies_for_budget",
    "single_use_super_replication",
]

MAX_EMULATED_QUBITS = 12


@dataclass(frozen=True)
class QuditSpec:
    """Diagonal generator of an n-level system, eigenvalues in units of theta."""

    n: int
    eigenvalues: tuple[float, ...]

    def __post_init__(self):
        ev = tuple(float(x) for x in self.eigenvalues)
        if self.n < 1 or len(ev) != self.n:
            raise DomainError(f"expected {self.n} eigenvalues, got {len(ev)}")
        if not all(math.isfinite(x) for x in ev):
            raise DomainError("eigenvalues must be finite")
        object.__setattr__(self, "eigenvalues", ev)

    def ladder_scale(self) -> float | None:
        """Gap g when the eigenvalues are exactly 0, g, 2g, ...; otherwise None."""
        if self.n == 1:
            return 1.0 if self.eigenvalues[0] == 0.0 else None
        g = self.eigenvalues[1]
        ok = all(math.isclose(lam, j * g, rel_tol=0, abs_tol=1e-15) for j, lam in enumerate(self.eigenvalues))
        return g if ok and g > 0 else None


def ladder_spec(levels: int, scale: float = 1.0) -> QuditSpec:
    """Ladder generator with eigenvalues j * scale, j = 0..levels-1."""
    return QuditSpec(levels, tuple(j * scale for j in range(levels)))


class QuditEvolution:
    """One application of V(theta) on a (levels, ancilla) array; counts its calls."""

    def __init__(self, spec: QuditSpec):
        self.spec = spec
        self.calls = 0

    def __call__(self, joint: np.ndarray, theta: float) -> np.ndarray:
        if joint.shape[0] != self.spec.n:
            raise DomainError(f"joint register has {joint.shape[0]} levels, spec has {self.spec.n}")
        self.calls += 1
        phases = np.exp(-1j * theta * np.asarray(self.spec.eigenvalues))
        return joint * phases[:, None]


def min_ancilla_count(n: int) -> int:
    """Fewest ancilla qubits whose dimension covers the largest sector C(n, n//2)."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return (math.comb(n, n // 2) - 1).bit_length()


def sector_routing(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Qudit level and ancilla index for every n-qubit basis state.

    States of equal Hamming weight are ranked in increasing index order, which
    is lexicographic order of their bit strings.
    """
    idx = np.arange(1 << n)
    level = popcount(idx)
    rank = np.empty(1 << n, dtype=np.int64)
    for k in range(n + 1):
        members = idx[level == k]
        rank[members] = np.arange(members.size)
    return level, rank


def emulate_qubits_from_qudit(
    n: int,
    theta: float,
    state: DenseState,
    *,
    spec: QuditSpec | None = None,
    evolution: QuditEvolution | None = None,
) -> DenseState:
    """Reproduce the n-qubit phase gate from a single qudit evolution.

    With the default ladder 0..n the result is U(theta)^{(x)n} applied to
    ``state``. A rescaled ladder with gap g yields U(g*theta)^{(x)n}. Pass
    ``evolution`` to inspect how many times V was applied.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if n > MAX_EMULATED_QUBITS:
        raise UnsupportedScaleError(f"emulation is capped at n <= {MAX_EMULATED_QUBITS} qubits")
    if state.qubit_count != n:
        raise DomainError(f"input has {state.qubit_count} qubits, expected {n}")
    if evolution is None:
        evolution = QuditEvolution(spec if spec is not None else ladder_spec(n + 1))
    qudit = evolution.spec
    if qudit.n < n + 1 or qudit.ladder_scale() is None:
        raise DomainError("the qudit needs an evenly spaced ladder with at least n + 1 levels")

    level, rank = sector_routing(n)
    aux = min_ancilla_count(n)
    joint = np.zeros((qudit.n, 1 << aux), dtype=complex)
    joint[level, rank] = state.amplitudes
    joint = evolution(joint, float(theta))
    return DenseState(n, joint[level, rank])


def bang_bang_effective_spectrum(n: int) -> QuditSpec:
    """Evenly gapped n-level spectrum j/n left by fast control pulses."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return ladder_spec(int(n), 1.0 / n)


def copies_for_budget(n: int, alpha: float, beta: float) -> tuple[int, int]:
    """Largest M with ceil(2*alpha*M**beta) <= n, and the unused slack.

    Returns ``(M, slack)`` where slack = n - ceil(2*alpha*M**beta). When no
    M >= 1 fits, M = 1 is used and the slack is negative.
    """
    def need(m: int) -> int:
        return math.ceil(2.0 * alpha * m**beta)

    if need(1) > n:
        return 1, n - need(1)
    guess = max(1, int((n / (2.0 * alpha)) ** (1.0 / beta)))
    m = guess
    while need(m + 1) <= n:
        m += 1
    while m > 1 and need(m) > n:
        m -= 1
    return m, n - need(m)


@dataclass(frozen=True)
class SingleUseResult:
    """Outcome of replicating U(theta/n) from one bang-bang qudit use."""

    config: ReplicationConfig
    slack: int
    effective_theta: float
    emulation_exact: bool
    report: FidelityReport


def single_use_super_replication(
    n: int,
    alpha: float,
    beta: float,
    theta: float,
    gamma_policy: GammaPolicy | str = GammaPolicy.RANDOM,
    seed: int = 0,
) -> SingleUseResult:
    """U(theta) -> approximately U(theta/n)^{(x)M} with M ~ (n / 2 alpha)^{1/beta}.

    The bang-bang spectrum turns the single use into a ladder evolved for
    theta/n; emulation turns that into n exact uses of U(theta/n); the
    replication protocol with N = n then serves M copies.
    """
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n!r}")
    if not (alpha > 0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be a positive finite number, got {alpha!r}")
    if not (0.5 < beta < 1.0):
        raise DomainError(f"beta must lie in (1/2, 1), got {beta!r}")
    n = int(n)
    M, slack = copies_for_budget(n, alpha, beta)
    half = alpha * M**beta
    lo, hi = max(M / 2.0 - half, -0.5), min(M / 2.0 + half, M + 0.5)
    config = ReplicationConfig(
        M=M, N=n, k_minus=lo, k_plus=hi, alpha=float(alpha), beta=float(beta),
        clamped=(M / 2.0 - half < 0 or M / 2.0 + half > M),
    )
    # n + 1 bang-bang levels j/n carry all n + 1 phases of U(theta/n)^{(x)n}
    spec = ladder_spec(n + 1, 1.0 / n)
    theta_eff = float(theta) / n
    exact = True
    if n <= MAX_EMULATED_QUBITS:
        probe = DenseState.random(n, seed)
        out = emulate_qubits_from_qudit(n, float(theta), probe, spec=spec)
        w = popcount(np.arange(1 << n))
        direct = probe.amplitudes * np.exp(-1j * theta_eff * w)
        exact = bool(np.max(np.abs(out.amplitudes - direct)) <= 1e-12)
    phase_map = build_sector_map(config, gamma_policy, seed)
    return SingleUseResult(
        config=config,
        slack=slack,
        effective_theta=theta_eff,
        emulation_exact=exact,
        report=fidelity_report(config, phase_map, theta_eff),
    )
