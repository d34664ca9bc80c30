"""Bernoulli bandit instances, gap computations, and seeded random streams."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import TiedBestArm

_BUFFER_SIZE = 8192


class RngStream:
    """Counter-keyed random stream built on numpy's Philox generator.

    Identical ``(seed, stream)`` pairs reproduce bit-identical draws; distinct
    pairs give statistically independent streams, so parallel runs are
    reproducible regardless of scheduling.  ``child(tag)`` derives an
    independent substream (e.g. one for rewards, one for privacy noise) so
    that consuming draws on one substream never shifts another.
    """

    def __init__(self, seed: int, stream: int = 0, _path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.stream = int(stream)
        self._path = _path
        key = (self.seed, self.stream) + _path
        self._gen = np.random.Generator(np.random.Philox(seed=np.random.SeedSequence(key)))
        self._buf: list[float] = []
        self._pos = 0

    def child(self, tag: int) -> "RngStream":
        """Derive an independent substream identified by ``tag``."""
        return RngStream(self.seed, self.stream, self._path + (int(tag),))

    def uniform(self) -> float:
        """Next uniform draw in [0, 1)."""
        if self._pos >= len(self._buf):
            self._buf = self._gen.random(_BUFFER_SIZE).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def uniforms(self, n: int) -> np.ndarray:
        """Array of ``n`` uniform draws, consumed after any buffered ones."""
        out = np.empty(n)
        for i in range(n):
            out[i] = self.uniform()
        return out

    def uniform_block(self, n: int) -> np.ndarray:
        """Fast block of ``n`` uniforms, bypassing the scalar buffer.

        Draw order interleaves with ``uniform()`` only through the underlying
        generator, so callers should stick to one access style per stream.
        """
        if self._pos < len(self._buf):
            head = np.asarray(self._buf[self._pos:])
            self._buf, self._pos = [], 0
            if len(head) >= n:
                self._buf = head[n:].tolist()
                return head[:n]
            return np.concatenate([head, self._gen.random(n - len(head))])
        return self._gen.random(n)

    def bernoulli(self, p: float) -> int:
        """Bernoulli(p) draw in {0, 1}."""
        return 1 if self.uniform() < p else 0

    @property
    def generator(self) -> np.random.Generator:
        """Underlying numpy generator, for batched distribution draws."""
        return self._gen


@dataclass(frozen=True)
class BanditInstance:
    """K-armed Bernoulli instance with means in [0, 1]."""

    means: tuple[float, ...]

    def __post_init__(self):
        means = tuple(float(m) for m in self.means)
        object.__setattr__(self, "means", means)
        if len(means) < 2:
            raise ValueError(f"need at least 2 arms, got {len(means)}")
        for m in means:
            if not 0.0 <= m <= 1.0:
                raise ValueError(f"mean {m} outside [0, 1]")

    @property
    def K(self) -> int:
        return len(self.means)


@dataclass(frozen=True)
class GapVector:
    """Suboptimality gaps of an instance with a unique best arm."""

    gaps: tuple[float, ...]
    min_gap: float = field(default=0.0)
    max_gap: float = field(default=0.0)

    @property
    def best(self) -> int:
        return self.gaps.index(0.0)

    @property
    def K(self) -> int:
        return len(self.gaps)


def best_arm(instance: BanditInstance) -> int:
    """Index of the arm with the strictly largest mean.

    Raises TiedBestArm when the maximum is attained more than once.
    """
    means = instance.means
    top = max(means)
    idx = means.index(top)
    if means.count(top) > 1:
        raise TiedBestArm(f"arms {[i for i, m in enumerate(means) if m == top]} tie at mean {top}")
    return idx


def gaps(instance: BanditInstance) -> GapVector:
    """Per-arm gaps to the best mean, with min/max over suboptimal arms."""
    star = best_arm(instance)
    top = instance.means[star]
    g = tuple(top - m for m in instance.means)
    sub = [x for i, x in enumerate(g) if i != star]
    return GapVector(gaps=g, min_gap=min(sub), max_gap=max(sub))


def sample_reward(instance: BanditInstance, arm: int, rng: RngStream) -> int:
    """One Bernoulli reward from ``arm``; advances the stream by one draw."""
    if not 0 <= arm < instance.K:
        raise IndexError(f"arm {arm} out of range for K={instance.K}")
    return rng.bernoulli(instance.means[arm])
