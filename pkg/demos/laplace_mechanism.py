"""The episode-mean Laplace mechanism, empirically.

Checks the two facts the privacy layer rests on: the mean of n rewards in
[0, 1] has sensitivity 1/n, and adding Laplace(1/(eps n)) noise makes the
scaled noise magnitude n*|Y| an Exponential(eps) variable.
"""

import numpy as np

from dpbai.bandit import RngStream
from dpbai.laplace import (
    EpisodeAccumulator,
    episode_mean_sensitivity,
    privatize_episode_mean,
    sample_laplace,
)

rng = RngStream(seed=123)

print("sensitivity of an n-reward episode mean:")
for n in (1, 4, 16, 64):
    print(f"  n = {n:>3}: 1/n = {episode_mean_sensitivity(n):.5f}")

print()
print("one-reward perturbation never moves the mean by more than 1/n:")
base = np.array([1, 0, 1, 1, 0, 0, 1, 0], dtype=float)
worst = 0.0
for i in range(len(base)):
    for v in (0.0, 1.0):
        alt = base.copy()
        alt[i] = v
        worst = max(worst, abs(alt.mean() - base.mean()))
print(f"  worst observed shift over all single flips: {worst:.5f} "
      f"(bound {episode_mean_sensitivity(len(base)):.5f})")

print()
print("noise calibration: n * |private mean - raw mean| ~ Exponential(eps)")
eps, n, draws = 0.5, 32, 200_000
acc = EpisodeAccumulator(arm=0, phase=3, reward_sum=20.0, local_count=n)
raw = acc.reward_sum / acc.local_count
scaled = np.array([
    n * abs(privatize_episode_mean(acc, eps, rng) - raw) for _ in range(draws)
])
print(f"  empirical mean {scaled.mean():.4f} vs 1/eps = {1 / eps:.4f}")
print(f"  empirical P(> 2/eps) {np.mean(scaled > 2 / eps):.4f} vs e^-2 = {np.exp(-2):.4f}")

print()
print("raw Laplace moments at scale b = 1 (variance should be 2 b^2):")
xs = np.array([sample_laplace(1.0, rng) for _ in range(200_000)])
print(f"  mean {xs.mean():+.4f}, variance {xs.var():.4f}")
