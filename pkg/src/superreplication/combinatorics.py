"""Binomial and multinomial machinery for typical-window masses.

Everything here works in log space (``math.lgamma`` and a saddle-point
decomposition of the binomial pmf) and sums with
``math.fsum`` so that qubit counts in the thousands neither overflow nor
lose mass to cancellation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DomainError, UnsupportedScaleError

__all__ = [
    "BinomialWeights",
    "log_binomial",
    "binomial_weights",
    "bulk_mass",
    "window_sectors",
    "gaussian_bulk_estimate",
    "gaussian_window_mass",
    "multinomial_bulk_mass",
    "MULTINOMIAL_MAX_CATEGORIES",
    "MULTINOMIAL_MAX_TRIALS",
]

MULTINOMIAL_MAX_CATEGORIES = 4
MULTINOMIAL_MAX_TRIALS = 64

@dataclass(frozen=True)
class BinomialWeights:
    """Sector weights p_k = C(M, k) / 2**M for k = 0..M."""

    M: int
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, k):
        return self.weights[k]

    def total(self) -> float:
        return math.fsum(self.weights)


def _check_int(name: str, value, minimum: int) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return value


def log_binomial(M: int, k: int) -> float:
    """Natural log of the binomial coefficient C(M, k) via log-gamma."""
    M = _check_int("M", M, 0)
    if isinstance(k, bool) or int(k) != k:
        raise DomainError(f"k must be an integer, got {k!r}")
    k = int(k)
    if k < 0 or k > M:
        raise DomainError(f"k must satisfy 0 <= k <= M, got k={k}, M={M}")
    if k == 0 or k == M:
        return 0.0
    return math.lgamma(M + 1) - math.lgamma(k + 1) - math.lgamma(M - k + 1)


_LN_2PI = math.log(2.0 * math.pi)


def _stirling_error(n: int) -> float:
    """log(n!) - log(sqrt(2 pi n) (n/e)^n), accurate to a few ulps."""
    if n <= 15:
        if n == 0:
            return 1.0 - 0.5 * _LN_2PI
        return math.lgamma(n + 1.0) - (n + 0.5) * math.log(n) + n - 0.5 * _LN_2PI
    s0, s1, s2, s3, s4 = 1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188
    nn = float(n) * n
    if n > 500:
        return (s0 - s1 / nn) / n
    if n > 80:
        return (s0 - (s1 - s2 / nn) / nn) / n
    if n > 35:
        return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n


def _deviance(x: float, mean: float) -> float:
    """x log(x/mean) + mean - x without cancellation when x is near mean."""
    if abs(x - mean) < 0.1 * (x + mean):
        v = (x - mean) / (x + mean)
        s = (x - mean) * v
        ej = 2.0 * x * v
        v2 = v * v
        j = 1
        while True:
            ej *= v2
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
            j += 1
    return x * math.log(x / mean) + mean - x


def _log_binomial_pmf(M: int, k: int, p: float = 0.5) -> float:
    """log of the binomial probability via the saddle-point decomposition.

    Every log-space term stays O(1) or O(log M), so the result keeps full
    relative precision where lgamma differences would lose ~log10(M!) digits.
    """
    q = 1.0 - p
    if k == 0:
        return M * math.log1p(-p)
    if k == M:
        return M * math.log(p)
    lc = (
        _stirling_error(M)
        - _stirling_error(k)
        - _stirling_error(M - k)
        - _deviance(k, M * p)
        - _deviance(M - k, M * q)
    )
    lf = _LN_2PI + math.log(k) + math.log1p(-k / M)
    return lc - 0.5 * lf


def _binomial_pmf(M: int, k: int, p: float = 0.5) -> float:
    """Binomial probability; the endpoints are exact powers of two at p = 1/2."""
    if p == 0.5 and (k == 0 or k == M):
        return math.ldexp(1.0, -M)
    return math.exp(_log_binomial_pmf(M, k, p))


@lru_cache(maxsize=64)
def _binomial_weights_cached(M: int) -> BinomialWeights:
    w = np.empty(M + 1)
    for k in range(M // 2 + 1):
        w[k] = _binomial_pmf(M, k)
        w[M - k] = w[k]
    w.setflags(write=False)
    return BinomialWeights(M=M, weights=w)


def binomial_weights(M: int) -> BinomialWeights:
    """Return the symmetric binomial distribution over Hamming weights.

    The lower half is computed in log space and mirrored, so
    ``p[k] == p[M - k]`` holds bit-for-bit. Cached per M; the array is
    read-only.
    """
    M = _check_int("M", M, 1)
    return _binomial_weights_cached(M)


def window_sectors(M: int, k_minus: float, k_plus: float) -> np.ndarray:
    """Integer Hamming weights k in [0, M] with k_minus < k < k_plus."""
    ks = np.arange(M + 1)
    return ks[(ks > k_minus) & (ks < k_plus)]


def bulk_mass(M: int, k_minus: float, k_plus: float) -> float:
    """Binomial probability of the open window (k_minus, k_plus)."""
    p = binomial_weights(M).weights
    ks = window_sectors(M, k_minus, k_plus)
    if ks.size == 0:
        return 0.0
    return min(1.0, math.fsum(p[ks]))


def _check_alpha_beta(alpha: float, beta: float) -> None:
    if not (alpha > 0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be a positive finite number, got {alpha!r}")
    if not (0.5 < beta < 1.0):
        raise DomainError(f"beta must lie in (1/2, 1), got {beta!r}")


def gaussian_window_mass(M: int, k_minus: float, k_plus: float) -> float:
    """Mass of N(M/2, M/4) on (k_minus, k_plus)."""
    M = _check_int("M", M, 1)
    if k_plus <= k_minus:
        return 0.0
    sigma = math.sqrt(M) / 2.0
    lo = (k_minus - M / 2.0) / (sigma * math.sqrt(2.0))
    hi = (k_plus - M / 2.0) / (sigma * math.sqrt(2.0))
    if lo <= 0.0 <= hi:
        return 0.5 * (math.erf(hi) - math.erf(lo))
    # same-side window: use complementary error functions to keep tails accurate
    if lo > 0.0:
        return 0.5 * (math.erfc(lo) - math.erfc(hi))
    return 0.5 * (math.erfc(-hi) - math.erfc(-lo))


def gaussian_bulk_estimate(alpha: float, beta: float, M: int) -> float:
    """Gaussian figure for the window M/2 +- alpha*M**beta.

    In units of the binomial standard deviation sqrt(M)/2 the window has
    half-width x = 2*alpha*M**(beta - 1/2); the result is the central
    standard-normal mass erf(x / sqrt(2)).
    """
    _check_alpha_beta(alpha, beta)
    M = _check_int("M", M, 1)
    x = 2.0 * alpha * M ** (beta - 0.5)
    return math.erf(x / math.sqrt(2.0))


def _log_multinomial(counts: Sequence[int]) -> float:
    n = sum(counts)
    return math.lgamma(n + 1) - math.fsum(math.lgamma(c + 1) for c in counts)


def _compositions(N: int, d: int):
    """All d-tuples of non-negative integers summing to N (stars and bars)."""
    for bars in itertools.combinations(range(N + d - 1), d - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(N + d - 2 - prev)
        yield out


def multinomial_bulk_mass(N: int, probs: Sequence[float], alpha: float, beta: float) -> float:
    """Probability that every multinomial count stays within alpha*N**beta of its mean.

    Membership is strict, |n_j - N p_j| < alpha*N**beta for every category j,
    matching the open binomial window. Exact enumeration over all
    compositions, so only small instances are accepted.

    Raises:
        UnsupportedScaleError: more than ``MULTINOMIAL_MAX_CATEGORIES``
            categories or more than ``MULTINOMIAL_MAX_TRIALS`` trials.
    """
    N = _check_int("N", N, 1)
    probs = [float(p) for p in probs]
    d = len(probs)
    if d < 1:
        raise DomainError("probs must be non-empty")
    if any(not (p > 0.0) for p in probs):
        raise DomainError("every probability must be positive")
    if abs(math.fsum(probs) - 1.0) > 1e-12:
        raise DomainError("probs must sum to 1 within 1e-12")
    if not (alpha > 0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be a positive finite number, got {alpha!r}")
    if not (0.0 < beta < 1.0):
        raise DomainError(f"beta must lie in (0, 1), got {beta!r}")
    if d > MULTINOMIAL_MAX_CATEGORIES or N > MULTINOMIAL_MAX_TRIALS:
        raise UnsupportedScaleError(
            f"exact enumeration supports d <= {MULTINOMIAL_MAX_CATEGORIES} and "
            f"N <= {MULTINOMIAL_MAX_TRIALS}; got d={d}, N={N}"
        )

    half_width = alpha * N**beta
    means = [N * p for p in probs]
    log_p = [math.log(p) for p in probs]
    terms = []
    for counts in _compositions(N, d):
        if all(abs(c - m) < half_width for c, m in zip(counts, means)):
            lw = _log_multinomial(counts) + math.fsum(c * lp for c, lp in zip(counts, log_p))
            terms.append(math.exp(lw))
    return min(1.0, math.fsum(terms))
