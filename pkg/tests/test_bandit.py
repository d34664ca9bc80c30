import math

import numpy as np
import pytest

from dpbai.bandit import BanditInstance, RngStream, best_arm, gaps, sample_reward
from dpbai.errors import TiedBestArm

MU1 = (0.95, 0.9, 0.9, 0.9, 0.5)


class TestBanditInstance:
    def test_validates_range(self):
        with pytest.raises(ValueError):
            BanditInstance((0.5, 1.2))
        with pytest.raises(ValueError):
            BanditInstance((-0.1, 0.5))

    def test_requires_two_arms(self):
        with pytest.raises(ValueError):
            BanditInstance((0.5,))

    def test_k(self):
        assert BanditInstance(MU1).K == 5


class TestBestArm:
    def test_mu1(self):
        assert best_arm(BanditInstance(MU1)) == 0

    def test_simple(self):
        assert best_arm(BanditInstance((0.2, 0.8))) == 1

    def test_tie_raises(self):
        with pytest.raises(TiedBestArm):
            best_arm(BanditInstance((0.5, 0.5)))


class TestGaps:
    def test_mu1(self):
        g = gaps(BanditInstance(MU1))
        assert g.gaps == pytest.approx((0.0, 0.05, 0.05, 0.05, 0.45))
        assert g.min_gap == pytest.approx(0.05)
        assert g.max_gap == pytest.approx(0.45)
        assert g.best == 0

    def test_equal_gaps(self):
        g = gaps(BanditInstance((0.75, 0.7, 0.7, 0.7, 0.7)))
        assert g.min_gap == pytest.approx(0.05)
        assert g.max_gap == pytest.approx(0.05)

    def test_extreme(self):
        g = gaps(BanditInstance((1.0, 0.0)))
        assert g.gaps == (0.0, 1.0)

    def test_propagates_tie(self):
        with pytest.raises(TiedBestArm):
            gaps(BanditInstance((0.3, 0.3, 0.1)))

    def test_consistency_on_random_instances(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            means = tuple(np.round(rng.uniform(0.05, 0.95, size=4), 6))
            if len(set(means)) < 4:
                continue
            inst = BanditInstance(means)
            g = gaps(inst)
            star = best_arm(inst)
            assert g.gaps[star] == 0.0
            assert all(g.gaps[a] > 0 for a in range(4) if a != star)


class TestSampleReward:
    def test_degenerate(self):
        inst = BanditInstance((1.0, 0.0))
        rng = RngStream(1)
        assert all(sample_reward(inst, 0, rng) == 1 for _ in range(100))
        assert all(sample_reward(inst, 1, rng) == 0 for _ in range(100))

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            sample_reward(BanditInstance((0.5, 0.4)), 2, RngStream(1))

    def test_law_of_large_numbers(self):
        inst = BanditInstance((0.5, 0.1))
        rng = RngStream(7)
        n = 10**5
        mean = sum(sample_reward(inst, 0, rng) for _ in range(n)) / n
        assert abs(mean - 0.5) < 0.01

    @pytest.mark.parametrize("mu", [0.1, 0.5, 0.9])
    def test_three_sigma(self, mu):
        inst = BanditInstance((mu, 0.0)) if mu > 0 else BanditInstance((mu, 1.0))
        rng = RngStream(11, stream=int(mu * 10))
        n = 10**5
        mean = float(np.mean(rng.uniform_block(n) < mu))
        assert abs(mean - mu) <= 3.0 * math.sqrt(mu * (1 - mu) / n)


class TestRngStream:
    def test_determinism(self):
        a = RngStream(123, 45)
        b = RngStream(123, 45)
        assert [a.uniform() for _ in range(100)] == [b.uniform() for _ in range(100)]

    def test_distinct_streams_differ(self):
        a = RngStream(123, 45)
        b = RngStream(123, 46)
        assert [a.uniform() for _ in range(10)] != [b.uniform() for _ in range(10)]

    def test_children_independent_of_consumption(self):
        # consuming the parent or a sibling must not shift a child's draws
        parent = RngStream(9, 2)
        child_before = parent.child(1).uniform()
        parent2 = RngStream(9, 2)
        parent2.uniform()
        parent2.child(0).uniform()
        assert parent2.child(1).uniform() == child_before

    def test_block_matches_scalar_sequence(self):
        # block draws continue the exact same underlying sequence
        a = RngStream(3, 1)
        scalars = [a.uniform() for _ in range(10)]
        b = RngStream(3, 1)
        first3 = [b.uniform() for _ in range(3)]
        rest = b.uniform_block(7)
        assert scalars == first3 + list(rest)

    def test_bernoulli_determinism(self):
        a = RngStream(1, 0)
        b = RngStream(1, 0)
        assert [a.bernoulli(0.3) for _ in range(50)] == [b.bernoulli(0.3) for _ in range(50)]
