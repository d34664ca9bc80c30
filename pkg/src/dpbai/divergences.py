"""Divergences and pairwise statistics used by the algorithms and solvers."""

from __future__ import annotations

import math

from .errors import DomainError, ZeroCount


def _check_prob(x: float, name: str) -> float:
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"{name}={x} outside [0, 1]")
    return float(x)


def kl_bernoulli(p: float, q: float) -> float:
    """Binary relative entropy kl(p, q) in nats.

    Conventions: 0 log 0 = 0; the value is +inf when q is degenerate
    (0 or 1) while p differs from it.
    """
    p = _check_prob(p, "p")
    q = _check_prob(q, "q")
    if p == q:
        return 0.0
    if q <= 0.0 or q >= 1.0:
        return math.inf
    val = 0.0
    if p > 0.0:
        val += p * math.log(p / q)
    if p < 1.0:
        val += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return val


def tv_bernoulli(p: float, q: float) -> float:
    """Total variation distance between Bernoulli(p) and Bernoulli(q): |p - q|."""
    p = _check_prob(p, "p")
    q = _check_prob(q, "q")
    return abs(p - q)


def glr_statistic(mean_a: float, mean_b: float, n_a: int, n_b: int) -> float:
    """Gaussian GLR statistic (mean_a - mean_b)^2 / (1/n_a + 1/n_b)."""
    if n_a < 1 or n_b < 1:
        raise ZeroCount(f"counts must be >= 1, got ({n_a}, {n_b})")
    d = mean_a - mean_b
    return d * d / (1.0 / n_a + 1.0 / n_b)


def transport_cost(mean_leader: float, mean_a: float, n_leader: int, n_a: int) -> float:
    """Signed transportation cost (mean_leader - mean_a) / sqrt(1/n_leader + 1/n_a).

    Negative when the challenger's mean exceeds the leader's.
    """
    if n_leader < 1 or n_a < 1:
        raise ZeroCount(f"counts must be >= 1, got ({n_leader}, {n_a})")
    return (mean_leader - mean_a) / math.sqrt(1.0 / n_leader + 1.0 / n_a)
