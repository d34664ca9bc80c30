"""Threshold functions for the private and non-private GLR stopping rules.

The non-private threshold follows the phase-indexed form

    c_k(n, m, d) = 2*C_G(log((K-1) * zeta(s)^2 * k^s / d) / 2)
                   + 2*log(4 + log n) + 2*log(4 + log m)

(the zeta(s)^2 variant, which is the one the union-bound calibration actually
uses), and the private threshold adds two Laplace-correction terms on top of
2*c_{k1*k2}(n, m, d/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy.optimize import minimize_scalar
from scipy.special import zeta as _hurwitz_zeta

from .divergences import glr_statistic
from .errors import DomainError, ZeroCount


@dataclass(frozen=True)
class ThresholdParams:
    """Static threshold configuration: arm count, union-bound exponent, budget.

    ``s`` defaults to 2 so that zeta(s) = pi^2/6 while the union bound over
    phase indices still converges.  ``epsilon`` is only consulted by the
    private threshold.
    """

    K: int
    s: float = 2.0
    epsilon: float | None = None

    def __post_init__(self):
        if self.K < 2:
            raise DomainError(f"K must be >= 2, got {self.K}")
        if self.s <= 1.0:
            raise DomainError(f"s must be > 1, got {self.s}")
        if self.epsilon is not None and self.epsilon <= 0.0:
            raise DomainError(f"epsilon must be positive, got {self.epsilon}")


def riemann_zeta(s: float) -> float:
    """Riemann zeta function for real s > 1."""
    if s <= 1.0:
        raise DomainError(f"zeta requires s > 1, got {s}")
    return float(_hurwitz_zeta(s, 1))


def _g_gaussian(lam: float) -> float:
    return (
        2.0 * lam
        - 2.0 * lam * math.log(4.0 * lam)
        + math.log(riemann_zeta(2.0 * lam))
        - 0.5 * math.log(1.0 - lam)
    )


@lru_cache(maxsize=None)
def c_gaussian(x: float) -> float:
    """C_G(x) = min over lambda in (1/2, 1] of (g_G(lambda) + x) / lambda.

    The objective diverges at both endpoints (zeta(2 lambda) as lambda -> 1/2,
    -log(1 - lambda)/2 as lambda -> 1), so the minimum is interior; a bounded
    scalar minimization resolves it to well below 1e-8.  C_G(x) ~ x + log(x).
    """
    if x < 1.0:
        raise DomainError(f"c_gaussian requires x >= 1, got {x}")
    res = minimize_scalar(
        lambda lam: (_g_gaussian(lam) + x) / lam,
        bounds=(0.5 + 1e-9, 1.0 - 1e-12),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(res.fun)


def _check_counts_and_delta(n: int, m: int, delta: float) -> None:
    if n < 1 or m < 1:
        raise ZeroCount(f"counts must be >= 1, got ({n}, {m})")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must be in (0, 1), got {delta}")


def nonprivate_threshold(k: int, n: int, m: int, delta: float, params: ThresholdParams) -> float:
    """Phase-indexed non-private GLR threshold c_k(n, m, delta)."""
    if k < 1:
        raise DomainError(f"phase product k must be >= 1, got {k}")
    _check_counts_and_delta(n, m, delta)
    z = riemann_zeta(params.s)
    x = 0.5 * math.log((params.K - 1) * z * z * k**params.s / delta)
    return (
        2.0 * c_gaussian(x)
        + 2.0 * math.log(4.0 + math.log(n))
        + 2.0 * math.log(4.0 + math.log(m))
    )


def private_threshold(
    k1: int, k2: int, n: int, m: int, delta: float, params: ThresholdParams
) -> float:
    """Private GLR threshold: 2*c_{k1*k2}(n, m, delta/2) plus Laplace corrections."""
    if k1 < 1 or k2 < 1:
        raise DomainError(f"phase indices must be >= 1, got ({k1}, {k2})")
    _check_counts_and_delta(n, m, delta)
    if params.epsilon is None:
        raise DomainError("private_threshold needs params.epsilon")
    eps = params.epsilon
    z = riemann_zeta(params.s)
    base = 2.0 * nonprivate_threshold(k1 * k2, n, m, delta / 2.0, params)
    corr1 = math.log(2.0 * params.K * k1**params.s * z / delta) ** 2 / (n * eps * eps)
    corr2 = math.log(2.0 * params.K * k2**params.s * z / delta) ** 2 / (m * eps * eps)
    return base + corr1 + corr2


def _stop_candidate(means) -> int:
    # argmax with ties broken toward the lowest index
    best, cand = -math.inf, 0
    for i, v in enumerate(means):
        if v > best:
            best, cand = v, i
    return cand


def should_stop(
    private_means, local_counts, phases, delta: float, params: ThresholdParams
) -> tuple[bool, int]:
    """Private GLR stopping decision.

    The candidate is the arm with the highest private mean; the rule stops
    when every other arm's GLR statistic clears twice the private threshold
    at the pair's phase indices and local counts.
    """
    cand = _stop_candidate(private_means)
    for b in range(len(private_means)):
        if b == cand:
            continue
        stat = glr_statistic(
            private_means[cand], private_means[b], local_counts[cand], local_counts[b]
        )
        thr = private_threshold(
            phases[cand], phases[b], local_counts[cand], local_counts[b], delta, params
        )
        if stat < 2.0 * thr:
            return False, cand
    return True, cand


def should_stop_nonprivate(
    means, local_counts, phases, delta: float, params: ThresholdParams
) -> tuple[bool, int]:
    """Non-private GLR stopping decision on raw episode means."""
    cand = _stop_candidate(means)
    for b in range(len(means)):
        if b == cand:
            continue
        stat = glr_statistic(means[cand], means[b], local_counts[cand], local_counts[b])
        thr = nonprivate_threshold(
            phases[cand] * phases[b], local_counts[cand], local_counts[b], delta, params
        )
        if stat < 2.0 * thr:
            return False, cand
    return True, cand
