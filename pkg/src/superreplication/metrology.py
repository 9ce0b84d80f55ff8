"""Metrology view of replication: QFI and state fidelities of symmetric inputs.

States are permutation symmetric with one amplitude per Hamming sector, so
everything here is a sum over M + 1 sectors weighted by
w_k = C(M, k) |c_k|^2.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .combinatorics import _log_binomial_pmf
from .emulation import copies_for_budget
from .errors import DomainError
from .protocol import (
    GammaPolicy,
    ReplicationConfig,
    SectorPhaseMap,
    average_process_fidelity,
    build_sector_map,
    plan_replication,
)

__all__ = [
    "SymmetricState",
    "plus_state",
    "ghz_state",
    "sector_state",
    "bulk_state",
    "qfi",
    "state_fidelity_under_protocol",
    "ResourceTable",
    "precision_resource_table",
]

_NORM_TOL = 1e-12
# beyond this M, C(M, k) is taken from log-gamma rather than exact integers
_EXACT_COMB_MAX_M = 1000


def _default_log_scale(M: int) -> float:
    # 2^{-M/2}; zero while plain doubles are enough
    return 0.0 if M <= _EXACT_COMB_MAX_M else -0.5 * M * math.log(2.0)


def _sector_normalizers(M: int, ks: np.ndarray) -> tuple[np.ndarray, float]:
    """Amplitudes a_k and a log scale with C(M, k) a_k^2 e^{2 scale} = 1 on ``ks``."""
    scale = _default_log_scale(M)
    if scale == 0.0:
        return np.array([math.exp(-0.5 * math.log(math.comb(M, int(k)))) for k in ks]), 0.0
    log_pmf = np.array([_log_binomial_pmf(M, int(k)) for k in ks])
    if log_pmf.min() > -1400.0:
        # 2 scale + M ln 2 cancels exactly, so only the pmf enters
        return np.exp(-0.5 * log_pmf), scale
    # far tail: a_k itself would overflow, so move it into the scale
    top = log_pmf.max()
    return np.exp(-0.5 * (log_pmf - top)), -0.5 * (top + M * math.log(2.0))


@dataclass(frozen=True)
class SymmetricState:
    """Sector-uniform M-qubit state: amplitude c_k e^{log_scale} on each weight-k basis state.

    ``log_scale`` keeps states such as |+>^{(x)M} representable once
    2^{-M/2} underflows a double.
    """

    M: int
    sector_amplitudes: np.ndarray
    log_scale: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.sector_amplitudes, dtype=complex)
        if isinstance(self.M, bool) or int(self.M) != self.M or self.M < 1:
            raise DomainError(f"M must be a positive integer, got {self.M!r}")
        if c.shape != (self.M + 1,):
            raise DomainError(f"expected {self.M + 1} sector amplitudes, got shape {c.shape}")
        if not math.isfinite(self.log_scale):
            raise DomainError(f"log_scale must be finite, got {self.log_scale!r}")
        c.setflags(write=False)
        object.__setattr__(self, "sector_amplitudes", c)

    @property
    def weights(self) -> np.ndarray:
        """Probability of each Hamming sector, C(M, k) |c_k|^2 e^{2 log_scale}."""
        mag = np.abs(self.sector_amplitudes)
        if self.M <= _EXACT_COMB_MAX_M and self.log_scale == 0.0:
            comb = np.array([float(math.comb(self.M, k)) for k in range(self.M + 1)])
            return comb * mag**2
        # |c_k|^2 alone underflows for large M; combine logs first
        w = np.zeros(self.M + 1)
        nz = np.flatnonzero(mag > 0)
        log_pmf = np.array([_log_binomial_pmf(self.M, int(k)) for k in nz])
        shift = 2.0 * self.log_scale + self.M * math.log(2.0)
        w[nz] = np.exp(log_pmf + 2.0 * np.log(mag[nz]) + shift)
        return w

    def norm(self) -> float:
        return math.fsum(self.weights)

    def is_normalized(self, tol: float = _NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol


def plus_state(M: int) -> SymmetricState:
    """|+>^{(x)M}: every sector amplitude equals 2^{-M/2}."""
    if M <= _EXACT_COMB_MAX_M:
        return SymmetricState(M, np.full(M + 1, 2.0 ** (-M / 2.0), dtype=complex))
    return SymmetricState(M, np.ones(M + 1, dtype=complex), _default_log_scale(M))


def ghz_state(M: int) -> SymmetricState:
    """(|0...0> + |1...1>)/sqrt(2)."""
    c = np.zeros(M + 1, dtype=complex)
    c[0] = c[M] = 1.0 / math.sqrt(2.0)
    return SymmetricState(M, c)


def sector_state(M: int, k: int) -> SymmetricState:
    """Uniform superposition of all weight-k basis states (a Dicke state)."""
    c = np.zeros(M + 1, dtype=complex)
    amp, scale = _sector_normalizers(M, np.array([k]))
    c[k] = amp[0]
    return SymmetricState(M, c, scale)


def bulk_state(
    config: ReplicationConfig, sector_weights: Sequence[float] | None = None, phases: Sequence[float] | None = None
) -> SymmetricState:
    """Symmetric state supported only on the bulk sectors of ``config``.

    ``sector_weights`` gives the probability of each bulk sector (defaults to
    uniform); ``phases`` an optional phase per bulk sector.
    """
    ks = config.bulk_sectors
    if ks.size == 0:
        raise DomainError("config has an empty bulk window")
    w = np.ones(ks.size) if sector_weights is None else np.asarray(sector_weights, dtype=float)
    if w.shape != ks.shape or np.any(w < 0) or not w.sum() > 0:
        raise DomainError("sector_weights must be non-negative with one entry per bulk sector")
    w = w / math.fsum(w)
    ph = np.zeros(ks.size) if phases is None else np.asarray(phases, dtype=float)
    c = np.zeros(config.M + 1, dtype=complex)
    amp, scale = _sector_normalizers(config.M, ks)
    c[ks] = np.sqrt(w) * amp * np.exp(1j * ph)
    return SymmetricState(config.M, c, scale)


def _checked_weights(state: SymmetricState) -> np.ndarray:
    w = state.weights
    total = math.fsum(w)
    if abs(total - 1.0) > _NORM_TOL:
        raise DomainError(f"state is not normalized (sum of sector weights = {total!r})")
    return w / total


def qfi(state: SymmetricState) -> float:
    """Pure-state quantum Fisher information for the Hamming-weight generator.

    Four times the variance of k under the sector weights; phases of the
    sector amplitudes play no role.
    """
    w = _checked_weights(state)
    ks = np.arange(state.M + 1, dtype=float)
    mean = math.fsum(w * ks)
    return 4.0 * math.fsum(w * (ks - mean) ** 2)


def state_fidelity_under_protocol(state: SymmetricState, phase_map: SectorPhaseMap, theta: float) -> float:
    """|<psi| V(theta)^dagger U(theta)^{(x)M} |psi>|^2 for a symmetric input."""
    if state.M != phase_map.M:
        raise DomainError(f"state has M = {state.M}, map has M = {phase_map.M}")
    w = _checked_weights(state)
    phases = phase_map.phase_shift * float(theta) - phase_map.gamma
    re = math.fsum(w * np.cos(phases))
    im = math.fsum(w * np.sin(phases))
    return min(1.0, re * re + im * im)


@dataclass(frozen=True)
class ResourceTable:
    """Three resources that give Heisenberg-scaling precision with N uses."""

    N: int
    replicated_copies: int
    product_qfi_single_uses: float
    entangled_qfi_n_uses: float
    product_qfi_replicated: float
    qudit_levels: int
    planned_copies: int
    planned_average_fidelity: float
    sql_label: str = "O(1/N)"
    heisenberg_label: str = "O(1/N^2)"

    def to_dict(self) -> dict:
        return asdict(self)


def precision_resource_table(
    N: int, alpha: float, beta: float, gamma_policy: GammaPolicy | str = GammaPolicy.RANDOM, seed: int = 0
) -> ResourceTable:
    """Compare N uses on GHZ, N^2 product uses, and one N-level qudit use.

    ``replicated_copies`` is the nominal N^2. ``planned_copies`` is the
    largest M whose planned budget ceil(2*alpha*M**beta) fits in N, together
    with the average process fidelity of that plan.
    """
    if isinstance(N, bool) or int(N) != N or N < 2:
        raise DomainError(f"N must be an integer >= 2, got {N!r}")
    N = int(N)
    M = N * N
    planned_m, _ = copies_for_budget(N, alpha, beta)
    planned = plan_replication(planned_m, alpha, beta)
    fbar = average_process_fidelity(build_sector_map(planned, gamma_policy, seed))
    return ResourceTable(
        N=N,
        replicated_copies=M,
        product_qfi_single_uses=qfi(plus_state(N)),
        entangled_qfi_n_uses=qfi(ghz_state(N)),
        product_qfi_replicated=qfi(plus_state(M)),
        qudit_levels=N,
        planned_copies=planned_m,
        planned_average_fidelity=fbar,
    )
