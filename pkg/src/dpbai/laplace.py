"""Laplace mechanism calibrated to per-episode means.

Raw reward sums live exclusively inside :class:`EpisodeAccumulator`; algorithm
decision code only ever sees the privatized output of
:func:`privatize_episode_mean` together with counts, which is what makes the
post-processing argument for the overall strategy inspectable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bandit import RngStream
from .errors import DomainError, EmptyEpisode, ZeroCount


def laplace_inverse_cdf(u: float, scale: float) -> float:
    """Map a uniform u in [0, 1) to a Laplace(0, scale) sample.

    x = -scale * sign(u - 1/2) * log(1 - 2|u - 1/2|); one uniform per draw,
    the median u = 1/2 maps to exactly 0.
    """
    if scale <= 0.0:
        raise DomainError(f"scale must be positive, got {scale}")
    v = u - 0.5
    w = 1.0 - 2.0 * abs(v)
    if w <= 0.0:
        w = 5e-324  # u landed on the open endpoint; clamp instead of -inf
    mag = -scale * math.log(w)
    return -mag if v < 0.0 else mag


def sample_laplace(scale: float, rng: RngStream) -> float:
    """One Laplace(0, scale) draw via inverse CDF of a single uniform."""
    if scale <= 0.0:
        raise DomainError(f"scale must be positive, got {scale}")
    return laplace_inverse_cdf(rng.uniform(), scale)


@dataclass
class EpisodeAccumulator:
    """Rewards of one arm collected strictly within its current phase window."""

    arm: int
    phase: int
    reward_sum: float = 0.0
    local_count: int = 0

    def add(self, reward: float) -> None:
        self.reward_sum += reward
        self.local_count += 1

    def mean(self) -> float:
        if self.local_count == 0:
            raise EmptyEpisode(f"arm {self.arm} phase {self.phase} has no rewards")
        return self.reward_sum / self.local_count


def episode_noise_scale(epsilon: float, local_count: int) -> float:
    """Laplace scale 1/(epsilon * count) for an episode mean of ``count`` rewards."""
    if epsilon <= 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if local_count < 1:
        raise ZeroCount(f"local count must be >= 1, got {local_count}")
    return 1.0 / (epsilon * local_count)


def privatize_episode_mean(acc: EpisodeAccumulator, epsilon: float, rng: RngStream) -> float:
    """Episode mean plus Laplace(1/(epsilon * count)) noise.

    This is the only place a raw episode mean crosses into algorithm-visible
    state; callers must not propagate ``acc.mean()`` itself.
    """
    if acc.local_count == 0:
        raise EmptyEpisode(f"arm {acc.arm} phase {acc.phase} has no rewards")
    return acc.mean() + sample_laplace(episode_noise_scale(epsilon, acc.local_count), rng)


def episode_mean_sensitivity(n: int) -> float:
    """L1 sensitivity 1/n of a mean of n rewards in [0, 1]."""
    if n < 1:
        raise ZeroCount(f"count must be >= 1, got {n}")
    return 1.0 / n
