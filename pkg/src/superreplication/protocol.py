"""Planning, sector phase maps and closed-form fidelities.

The ideal operation U(theta)^{(x)M} multiplies every basis state of Hamming
weight k by exp(-i k theta). The replicated operation reproduces that phase,
up to one global offset, on the typical window of sectors and applies a
static phase elsewhere:

    V(theta) = sum_k exp(-i (a(k) theta + gamma_k)) P_k

where P_k projects onto the weight-k sector. Both operations are diagonal,
so the Choi overlap collapses to a binomially weighted phase sum that costs
O(M) per angle.
"""
from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from .combinatorics import (
    binomial_weights,
    bulk_mass as _bulk_mass,
    gaussian_bulk_estimate,
    gaussian_window_mass,
    window_sectors,
)
from .errors import DomainError

__all__ = [
    "GammaPolicy",
    "ReplicationConfig",
    "SectorPhaseMap",
    "FidelityReport",
    "plan_replication",
    "plan_for_budget",
    "build_sector_map",
    "draw_gamma",
    "process_fidelity",
    "average_process_fidelity",
    "average_state_fidelity",
    "worst_case_bound",
    "fidelity_report",
    "fidelity_sweep",
    "uniform_thetas",
]

TWO_PI = 2.0 * math.pi


class GammaPolicy(str, enum.Enum):
    """Static phases placed on sectors outside the typical window."""

    ZERO = "zero"
    RANDOM = "random"


@dataclass(frozen=True)
class ReplicationConfig:
    """One replication instance: M target copies from N uses.

    The bulk is the open window ``(k_minus, k_plus)``. ``alpha`` and ``beta``
    are ``None`` for configs built from an explicit window or budget.
    ``clamped`` records that a planned window reached past [0, M]; it is then
    cut back to at most (-1/2, M + 1/2), which still holds every sector.
    """

    M: int
    N: int
    k_minus: float
    k_plus: float
    alpha: float | None = None
    beta: float | None = None
    clamped: bool = False

    def __post_init__(self):
        if isinstance(self.M, bool) or int(self.M) != self.M or self.M < 1:
            raise DomainError(f"M must be a positive integer, got {self.M!r}")
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 0:
            raise DomainError(f"N must be a non-negative integer, got {self.N!r}")
        if not (math.isfinite(self.k_minus) and math.isfinite(self.k_plus)):
            raise DomainError("window endpoints must be finite")
        if self.k_plus < self.k_minus:
            raise DomainError("k_plus must not be below k_minus")
        count = self.bulk_sectors.size
        if count > self.N + 1:
            raise DomainError(
                f"window holds {count} sectors but N={self.N} uses realize at most "
                f"{self.N + 1} distinct phase multiples"
            )

    @property
    def bulk_sectors(self) -> np.ndarray:
        return window_sectors(self.M, self.k_minus, self.k_plus)

    @property
    def k_offset(self) -> int | None:
        """Smallest bulk Hamming weight; its phase multiple is zero."""
        ks = self.bulk_sectors
        return int(ks[0]) if ks.size else None

    @property
    def bulk_mass(self) -> float:
        return _bulk_mass(self.M, self.k_minus, self.k_plus)

    @property
    def covers_all(self) -> bool:
        return self.bulk_sectors.size == self.M + 1

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bulk_sector_count"] = int(self.bulk_sectors.size)
        return d


def _clamp_window(M: int, k_minus: float, k_plus: float) -> tuple[float, float, bool]:
    lo, hi = max(k_minus, -0.5), min(k_plus, M + 0.5)
    return lo, hi, (k_minus < 0 or k_plus > M)


def plan_replication(M: int, alpha: float, beta: float) -> ReplicationConfig:
    """Plan the window M/2 +- alpha*M**beta and the budget N = ceil(2*alpha*M**beta)."""
    if isinstance(M, bool) or int(M) != M or M < 1:
        raise DomainError(f"M must be a positive integer, got {M!r}")
    if not (alpha > 0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be a positive finite number, got {alpha!r}")
    if not (0.5 < beta < 1.0):
        raise DomainError(f"beta must lie in (1/2, 1), got {beta!r}")
    M = int(M)
    half = alpha * M**beta
    N = math.ceil(2.0 * half)
    lo, hi, clamped = _clamp_window(M, M / 2.0 - half, M / 2.0 + half)
    return ReplicationConfig(
        M=M, N=N, k_minus=lo, k_plus=hi, alpha=float(alpha), beta=float(beta), clamped=clamped
    )


def plan_for_budget(M: int, N: int) -> ReplicationConfig:
    """Widest window centred on M/2 that N uses can serve.

    Half-width (N + 1)/2 admits at most N + 1 integer sectors for either
    parity of M.
    """
    if isinstance(N, bool) or int(N) != N or N < 0:
        raise DomainError(f"N must be a non-negative integer, got {N!r}")
    if isinstance(M, bool) or int(M) != M or M < 1:
        raise DomainError(f"M must be a positive integer, got {M!r}")
    half = (N + 1) / 2.0
    lo, hi, clamped = _clamp_window(M, M / 2.0 - half, M / 2.0 + half)
    return ReplicationConfig(M=int(M), N=int(N), k_minus=lo, k_plus=hi, clamped=clamped)


@dataclass(frozen=True)
class SectorPhaseMap:
    """Per-sector phase multiple ``a[k]`` and static phase ``gamma[k]`` (radians)."""

    M: int
    a: np.ndarray
    gamma: np.ndarray
    bulk: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.int64)
        g = np.asarray(self.gamma, dtype=float)
        b = np.asarray(self.bulk, dtype=bool)
        if not (a.shape == g.shape == b.shape == (self.M + 1,)):
            raise DomainError("a, gamma and bulk must each have M + 1 entries")
        for arr in (a, g, b):
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "bulk", b)

    @property
    def phase_shift(self) -> np.ndarray:
        """k - a(k): the integer frequency left over once the map is applied."""
        return np.arange(self.M + 1) - self.a

    def realized_phase(self, theta: float) -> np.ndarray:
        return self.a * theta + self.gamma

    def ideal_phase(self, theta: float) -> np.ndarray:
        return np.arange(self.M + 1) * theta


def draw_gamma(seed: int) -> float:
    """Uniform draw from (0, 2*pi] using numpy's default PCG64 generator."""
    rng = np.random.default_rng(seed)
    return TWO_PI * (1.0 - rng.random())


def build_sector_map(
    config: ReplicationConfig, gamma_policy: GammaPolicy | str = GammaPolicy.RANDOM, seed: int = 0
) -> SectorPhaseMap:
    """Assign phase multiples to bulk sectors and static phases to the rest.

    Bulk sector k gets a(k) = k - k_offset, so consecutive sectors get
    consecutive multiples starting at 0. Non-bulk sectors get a(k) = 0 and
    gamma_k = 0 (``zero``) or gamma_k = g*k with a single seeded g in
    (0, 2*pi] (``random``).
    """
    policy = GammaPolicy(gamma_policy)
    M = config.M
    ks = np.arange(M + 1)
    bulk = np.zeros(M + 1, dtype=bool)
    bulk[config.bulk_sectors] = True
    a = np.zeros(M + 1, dtype=np.int64)
    if bulk.any():
        a[bulk] = ks[bulk] - config.k_offset
    gamma = np.zeros(M + 1)
    if policy is GammaPolicy.RANDOM:
        g = draw_gamma(seed)
        gamma[~bulk] = g * ks[~bulk]
    return SectorPhaseMap(M=M, a=a, gamma=gamma, bulk=bulk)


def _modulus_squared(weights: np.ndarray, phases: np.ndarray) -> float:
    re = math.fsum(weights * np.cos(phases))
    im = math.fsum(weights * np.sin(phases))
    return re * re + im * im


def process_fidelity(phase_map: SectorPhaseMap, theta: float) -> float:
    """Squared Choi-state overlap between the replicated and the ideal operation.

    F(theta) = |sum_k p_k exp(i[(k - a(k)) theta - gamma_k])|^2, with p_k the
    binomial sector weights. Periodic in theta with period 2*pi.
    """
    p = binomial_weights(phase_map.M).weights
    phases = phase_map.phase_shift * float(theta) - phase_map.gamma
    return min(1.0, _modulus_squared(p, phases))


def average_process_fidelity(phase_map: SectorPhaseMap) -> float:
    """Process fidelity averaged uniformly over theta in [0, 2*pi).

    Cross terms between sectors with different integer shifts k - a(k)
    integrate to zero, leaving sum_d |sum_{k - a(k) = d} p_k exp(-i gamma_k)|^2.
    """
    p = binomial_weights(phase_map.M).weights
    groups: dict[int, list[int]] = defaultdict(list)
    for k, d in enumerate(phase_map.phase_shift):
        groups[int(d)].append(k)
    total = []
    for ks in groups.values():
        idx = np.asarray(ks)
        total.append(_modulus_squared(p[idx], -phase_map.gamma[idx]))
    return min(1.0, math.fsum(total))


def average_state_fidelity(process_fidelity: float, M: int) -> float:
    """Input-averaged state fidelity (F * 2**M + 1) / (2**M + 1).

    Rewritten as F + (1 - F) / (2**M + 1) with the small term formed from
    2**-M, so large M neither overflows nor cancels.
    """
    if not (-1e-12 <= process_fidelity <= 1.0 + 1e-12):
        raise DomainError(f"process fidelity must lie in [0, 1], got {process_fidelity!r}")
    if isinstance(M, bool) or int(M) != M or M < 1:
        raise DomainError(f"M must be a positive integer, got {M!r}")
    inv = math.ldexp(1.0, -int(M))
    return process_fidelity + (1.0 - process_fidelity) * inv / (1.0 + inv)


def worst_case_bound(config: ReplicationConfig) -> tuple[float, float]:
    """Return ``(gaussian_figure, triangle_floor)`` for a config.

    The Gaussian figure is the normal approximation to the window mass. The
    triangle floor max(0, 2B - 1)**2, with B the exact window mass, lower
    bounds the process fidelity for every choice of static phases.
    """
    if config.alpha is not None and config.beta is not None:
        gauss = gaussian_bulk_estimate(config.alpha, config.beta, config.M)
    else:
        gauss = gaussian_window_mass(config.M, config.k_minus, config.k_plus)
    b = config.bulk_mass
    floor = max(0.0, 2.0 * b - 1.0) ** 2
    return gauss, floor


@dataclass(frozen=True)
class FidelityReport:
    theta: float
    process_fidelity: float
    average_state_fidelity: float
    gaussian_bound: float
    bulk_mass: float
    worst_case_bound: float

    def to_dict(self) -> dict:
        return asdict(self)


def fidelity_report(config: ReplicationConfig, phase_map: SectorPhaseMap, theta: float) -> FidelityReport:
    gauss, floor = worst_case_bound(config)
    fe = process_fidelity(phase_map, theta)
    return FidelityReport(
        theta=float(theta),
        process_fidelity=fe,
        average_state_fidelity=average_state_fidelity(fe, config.M),
        gaussian_bound=gauss,
        bulk_mass=config.bulk_mass,
        worst_case_bound=floor,
    )


def fidelity_sweep(
    config: ReplicationConfig,
    gamma_policy: GammaPolicy | str = GammaPolicy.RANDOM,
    seed: int = 0,
    thetas: Iterable[float] = (),
) -> list[FidelityReport]:
    """One report per angle, in the order given."""
    thetas = [float(t) for t in thetas]
    if not thetas:
        raise DomainError("thetas must be non-empty")
    if not all(math.isfinite(t) for t in thetas):
        raise DomainError("thetas must be finite")
    phase_map = build_sector_map(config, gamma_policy, seed)
    gauss, floor = worst_case_bound(config)
    b = config.bulk_mass
    reports = []
    for t in thetas:
        fe = process_fidelity(phase_map, t)
        reports.append(
            FidelityReport(
                theta=t,
                process_fidelity=fe,
                average_state_fidelity=average_state_fidelity(fe, config.M),
                gaussian_bound=gauss,
                bulk_mass=b,
                worst_case_bound=floor,
            )
        )
    return reports


def uniform_thetas(count: int) -> np.ndarray:
    """``count`` equally spaced angles on [0, 2*pi)."""
    if isinstance(count, bool) or int(count) != count or count < 1:
        raise DomainError(f"theta count must be a positive integer, got {count!r}")
    return TWO_PI * np.arange(int(count)) / int(count)
