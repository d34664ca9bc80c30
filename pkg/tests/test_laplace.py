import math

import numpy as np
import pytest

from dpbai.bandit import BanditInstance, RngStream
from dpbai.algorithms import run_adap_tt
from dpbai.errors import DomainError, EmptyEpisode, ZeroCount
from dpbai.laplace import (
    EpisodeAccumulator,
    episode_mean_sensitivity,
    episode_noise_scale,
    laplace_inverse_cdf,
    privatize_episode_mean,
    sample_laplace,
)


class TestLaplaceSampling:
    def test_moments(self):
        rng = RngStream(77)
        draws = np.array([sample_laplace(1.0, rng) for _ in range(10**5)])
        assert abs(draws.mean()) < 0.02
        assert abs(draws.var() - 2.0) < 0.1  # variance 2 b^2 at b = 1

    def test_median_maps_to_zero(self):
        assert laplace_inverse_cdf(0.5, 1.0) == 0.0
        assert laplace_inverse_cdf(0.5, 7.3) == 0.0

    def test_scale_equivariance(self):
        us = np.linspace(0.01, 0.99, 37)
        for u in us:
            assert laplace_inverse_cdf(u, 2.0) == pytest.approx(
                2.0 * laplace_inverse_cdf(u, 1.0), abs=1e-14
            )

    def test_symmetry(self):
        assert laplace_inverse_cdf(0.75, 1.0) == pytest.approx(-laplace_inverse_cdf(0.25, 1.0))

    def test_extreme_uniform_is_finite(self):
        assert math.isfinite(laplace_inverse_cdf(0.0, 1.0))

    def test_domain(self):
        with pytest.raises(DomainError):
            sample_laplace(0.0, RngStream(1))
        with pytest.raises(DomainError):
            sample_laplace(-1.0, RngStream(1))

    def test_determinism(self):
        a = [sample_laplace(0.5, RngStream(9, 4)) for _ in range(1)]
        b = [sample_laplace(0.5, RngStream(9, 4)) for _ in range(1)]
        assert a == b


class TestEpisodeAccumulator:
    def test_mean(self):
        acc = EpisodeAccumulator(arm=0, phase=2)
        for r in (1.0, 0.0, 1.0, 1.0):
            acc.add(r)
        assert acc.local_count == 4
        assert acc.mean() == pytest.approx(0.75)

    def test_empty_raises(self):
        with pytest.raises(EmptyEpisode):
            EpisodeAccumulator(arm=0, phase=1).mean()


class TestPrivatizeEpisodeMean:
    def test_noise_scale(self):
        assert episode_noise_scale(1.0, 4) == pytest.approx(0.25)
        assert episode_noise_scale(2.0, 10) == pytest.approx(0.05)

    def test_high_budget_limit(self):
        rng = RngStream(3)
        acc = EpisodeAccumulator(arm=0, phase=2, reward_sum=3.0, local_count=4)
        hits = sum(
            abs(privatize_episode_mean(acc, 1e9, rng) - 0.75) < 1e-6 for _ in range(1000)
        )
        assert hits >= 999

    def test_empty_episode(self):
        with pytest.raises(EmptyEpisode):
            privatize_episode_mean(EpisodeAccumulator(arm=0, phase=1), 1.0, RngStream(1))

    def test_determinism(self):
        acc = EpisodeAccumulator(arm=1, phase=3, reward_sum=5.0, local_count=8)
        a = privatize_episode_mean(acc, 0.5, RngStream(4, 2))
        b = privatize_episode_mean(acc, 0.5, RngStream(4, 2))
        assert a == b

    def test_noise_calibration(self):
        # local_count * |noise| is Exponential(eps) with mean 1/eps
        eps, count = 0.7, 16
        acc = EpisodeAccumulator(arm=0, phase=2, reward_sum=8.0, local_count=count)
        rng = RngStream(13)
        raw = acc.mean()
        scaled = [
            count * abs(privatize_episode_mean(acc, eps, rng) - raw) for _ in range(10**5)
        ]
        assert np.mean(scaled) == pytest.approx(1.0 / eps, rel=0.05)


class TestSensitivity:
    def test_values(self):
        assert episode_mean_sensitivity(1) == 1.0
        assert episode_mean_sensitivity(8) == pytest.approx(0.125)

    def test_zero_count(self):
        with pytest.raises(ZeroCount):
            episode_mean_sensitivity(0)

    def test_one_flip_brute_force(self):
        rewards = [0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]
        base = sum(rewards) / len(rewards)
        for i in range(len(rewards)):
            for new in (0.0, 1.0):
                flipped = list(rewards)
                flipped[i] = new
                dev = abs(sum(flipped) / len(flipped) - base)
                assert dev <= episode_mean_sensitivity(len(rewards)) + 1e-15
        flipped = list(rewards)
        flipped[0] = 1.0
        assert abs(sum(flipped) / 8 - base) == pytest.approx(0.125)


@pytest.fixture(scope="module")
def recorded():
    inst = BanditInstance((0.8, 0.5, 0.3))
    return run_adap_tt(inst, delta=0.1, epsilon=1.0, seed=21, record=True, cap=10**6)


class TestForgettingStructure:
    """Replay the accumulator layer on a recorded trace."""

    def test_windows_partition_history(self, recorded):
        trace = recorded.trace
        pulls = trace.pulls
        for arm in range(3):
            rounds = [t + 1 for t, a in enumerate(pulls) if a == arm]
            episodes = sorted(
                (e for e in trace.episodes if e.arm == arm), key=lambda e: e.phase
            )
            covered = []
            for ep in episodes:
                window = [r for r in rounds if ep.start <= r <= ep.end]
                assert len(window) == ep.count
                covered.extend(window)
            # closed episodes cover a prefix of the arm's pull history, disjointly
            assert covered == sorted(covered)
            assert len(covered) == len(set(covered))
            assert covered == rounds[: len(covered)]

    def test_perturbation_locality(self, recorded):
        # flipping one reward moves exactly one closed (arm, phase) mean,
        # and by no more than the episode's sensitivity
        trace = recorded.trace
        pulls = trace.pulls
        rng = np.random.default_rng(0)
        rewards = rng.integers(0, 2, size=len(pulls)).astype(float)

        def episode_means(rs):
            out = {}
            for ep in trace.episodes:
                window = [
                    t for t, a in enumerate(pulls) if a == ep.arm and ep.start <= t + 1 <= ep.end
                ]
                out[(ep.arm, ep.phase)] = sum(rs[t] for t in window) / ep.count
            return out

        base = episode_means(rewards)
        target = next(e for e in trace.episodes if e.count >= 4)
        flip_round = target.start  # first pull of that window
        perturbed = rewards.copy()
        perturbed[flip_round - 1] = 1.0 - perturbed[flip_round - 1]
        after = episode_means(perturbed)
        changed = [k for k in base if base[k] != after[k]]
        assert changed == [(target.arm, target.phase)]
        assert abs(after[changed[0]] - base[changed[0]]) <= episode_mean_sensitivity(
            target.count
        ) + 1e-15
