"""The four sequential strategies, driven to a stopping decision.

* AdaP-TT: per-arm doubling episodes with forgetting, Laplace-privatized
  episode means (clipped to [0,1] for decision making, which is free
  post-processing), a private UCB leader / transportation-cost challenger
  pair, deterministic beta-tracking, and the private GLR stopping rule.
* Non-private AdaP-TT: the same episode machinery on raw episode means with
  the non-private threshold.
* TTUCB: full-history means, UCB leader with a sqrt(6 log n / N) bonus, TC
  challenger, and the non-private GLR rule without phase indices.
* DP-SE: successive elimination in doubling epochs with fresh privatized
  per-epoch means.

Each run has two engines.  The numba kernel consumes pre-drawn uniform blocks
and drives sweeps; the pure-Python reference runner (``record=True``) replays
the exact same draw sequence, records a full trace (pulls, episodes, tracking
deviations), and is what the structural-invariant tests inspect.  An
equivalence test pins the two engines to identical results.

The GLR statistics, the candidate answer, and the leader only change when a
phase switches, so the stopping rule and leader are re-evaluated exactly at
switches; this is equivalent to the per-round evaluation they denote.

Decision isolation: leader, challenger, stopping, and recommendation receive
only (private or raw-episode) decision means and counts; per-pull reward sums
stay inside the episode accumulators.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import _kernels
from .bandit import BanditInstance, RngStream, best_arm
from .errors import Uninitialized
from .laplace import (
    EpisodeAccumulator,
    episode_noise_scale,
    privatize_episode_mean,
    sample_laplace,
)
from .thresholds import (
    ThresholdParams,
    c_gaussian,
    nonprivate_threshold,
    private_threshold,
    riemann_zeta,
    should_stop,
    should_stop_nonprivate,
)

DEFAULT_CAP = 10**9
_PHASE_TABLE_SIZE = 50  # local counts would reach 2^48 before saturating
_REWARD_CHUNK = 1 << 19
_NOISE_CHUNK = 1 << 12


@dataclass
class PhaseState:
    """Per-arm episode bookkeeping for the adaptive-phase algorithms."""

    K: int
    phases: list[int]  # k_a
    switch_times: list[int]  # T_{k_a}(a)
    global_counts: list[int]  # N_{n,a}
    switch_counts: list[int]  # N at the last switch, the doubling reference
    local_counts: list[int]  # pulls inside the last completed phase
    raw_means: list[float]  # confined; never fed to decision functions
    private_means: list[float]
    accumulators: list[EpisodeAccumulator]

    @classmethod
    def fresh(cls, K: int) -> "PhaseState":
        return cls(
            K=K,
            phases=[1] * K,
            switch_times=[K + 1] * K,
            global_counts=[1] * K,
            switch_counts=[1] * K,
            local_counts=[1] * K,
            raw_means=[0.0] * K,
            private_means=[0.0] * K,
            accumulators=[EpisodeAccumulator(arm=a, phase=2) for a in range(K)],
        )


@dataclass
class TrackingState:
    """Leader counts L and (leader, pulled) pair counts N^a_b."""

    K: int
    leader_counts: list[int]
    pair_counts: list[list[int]]

    @classmethod
    def fresh(cls, K: int) -> "TrackingState":
        return cls(K=K, leader_counts=[0] * K, pair_counts=[[0] * K for _ in range(K)])

    def self_count(self, a: int) -> int:
        return self.pair_counts[a][a]


@dataclass
class Episode:
    """One closed (arm, phase) reward window."""

    arm: int
    phase: int
    start: int  # round of the first pull in the window
    end: int  # round of the last pull in the window
    count: int
    raw_mean: float
    private_mean: float


@dataclass
class RunTrace:
    """Recorded internals of a reference-engine run."""

    pulls: list[int] = field(default_factory=list)  # arm pulled at rounds 1..tau-1
    leaders: list[int] = field(default_factory=list)  # leader at rounds K+1..tau-1
    episodes: list[Episode] = field(default_factory=list)
    tracking_dev_lo: float = 0.0  # min over steps of N^a_a - beta * L_a
    tracking_dev_hi: float = 0.0  # max over steps of N^a_a - beta * L_a
    doubling_ok: bool = True


@dataclass(frozen=True)
class RunResult:
    """Outcome of one algorithm run."""

    algo: str
    stopping_time: int
    recommended_arm: int
    correct: bool
    seed: int
    stream: int
    arm_counts: tuple[int, ...]
    capped: bool
    duration: float
    trace: RunTrace | None = None


def select_private_leader(private_means, phases, local_counts, epsilon: float) -> int:
    """Private UCB leader: argmax of mu~ + sqrt(k/N~) + k/(eps*N~); ties low."""
    best, B = -math.inf, -1
    for a in range(len(private_means)):
        if local_counts[a] < 1:
            raise Uninitialized(f"arm {a} has no completed episode")
        idx = private_means[a] + math.sqrt(phases[a] / local_counts[a])
        idx += phases[a] / (epsilon * local_counts[a])
        if idx > best:
            best, B = idx, a
    return B


def select_nonprivate_leader(means, phases, local_counts) -> int:
    """UCB leader on raw episode means with the sqrt(k/N~) bonus only."""
    best, B = -math.inf, -1
    for a in range(len(means)):
        if local_counts[a] < 1:
            raise Uninitialized(f"arm {a} has no completed episode")
        idx = means[a] + math.sqrt(phases[a] / local_counts[a])
        if idx > best:
            best, B = idx, a
    return B


def select_challenger(decision_means, global_counts, leader: int) -> int:
    """Transportation-cost challenger on global counts; ties to lowest index."""
    if len(decision_means) < 2:
        raise Uninitialized("need at least two arms")
    best, C = math.inf, -1
    mB = decision_means[leader]
    for a in range(len(decision_means)):
        if a == leader:
            continue
        if global_counts[a] < 1 or global_counts[leader] < 1:
            raise Uninitialized("challenger needs every arm pulled at least once")
        c = (mB - decision_means[a]) / math.sqrt(
            1.0 / global_counts[leader] + 1.0 / global_counts[a]
        )
        if c < best:
            best, C = c, a
    return C


def tracking_choice(tracking: TrackingState, leader: int, beta: float) -> bool:
    """True when the leader should be pulled: N^B_B <= beta * L_B.

    The leader count must already be incremented for the upcoming round; the
    comparison reads L_{n+1,B}.
    """
    return tracking.self_count(leader) <= beta * tracking.leader_counts[leader]


def _argmax_first(values) -> int:
    best, idx = -math.inf, 0
    for i, v in enumerate(values):
        if v > best:
            best, idx = v, i
    return idx


@lru_cache(maxsize=64)
def _threshold_table(delta: float, params: ThresholdParams, private: bool) -> np.ndarray:
    """Stopping thresholds indexed by the phase pair (k1, k2).

    The doubling structure pins the local count at phase k (1 for k = 1,
    2^(k-2) beyond), so thresholds depend on the phase indices alone.
    """
    size = _PHASE_TABLE_SIZE
    table = np.full((size + 1, size + 1), np.nan)
    for k1 in range(1, size + 1):
        n = 1 if k1 == 1 else 2 ** (k1 - 2)
        for k2 in range(1, size + 1):
            m = 1 if k2 == 1 else 2 ** (k2 - 2)
            if private:
                table[k1, k2] = private_threshold(k1, k2, n, m, delta, params)
            else:
                table[k1, k2] = nonprivate_threshold(k1 * k2, n, m, delta, params)
    return table


def _resolve_params(
    instance: BanditInstance, params: ThresholdParams | None, epsilon: float | None
) -> ThresholdParams:
    if params is None:
        params = ThresholdParams(K=instance.K, epsilon=epsilon)
    if params.K != instance.K:
        raise ValueError(f"params.K={params.K} does not match instance K={instance.K}")
    if epsilon is not None and params.epsilon != epsilon:
        params = replace(params, epsilon=epsilon)
    return params


def _validate_run_args(delta: float, beta: float, cap: int) -> None:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must be in (0, 1), got {beta}")
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")


def _finish(
    algo, instance, tau, rec, rng, counts, capped, t0, trace=None
) -> RunResult:
    return RunResult(
        algo=algo,
        stopping_time=int(tau),
        recommended_arm=int(rec),
        correct=int(rec) == best_arm(instance),
        seed=rng.seed,
        stream=rng.stream,
        arm_counts=tuple(int(c) for c in counts),
        capped=capped,
        duration=time.perf_counter() - t0,
        trace=trace,
    )


def _clip01(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


def _initial_episode_stats(
    instance: BanditInstance, rewards: RngStream, noise: RngStream | None, epsilon: float | None
) -> tuple[list[float], list[float]]:
    """Initialization: one pull per arm; phase-1 stats from that single reward.

    Decision copies of private means are clipped to [0,1] (post-processing;
    see the clipping note in the kernel's switch handling).
    """
    init_rewards, decision = [], []
    for a in range(instance.K):
        r = float(rewards.bernoulli(instance.means[a]))
        init_rewards.append(r)
        if noise is not None:
            decision.append(_clip01(r + sample_laplace(episode_noise_scale(epsilon, 1), noise)))
        else:
            decision.append(r)
    return init_rewards, decision


def _run_adaptive_kernel(
    algo: str,
    instance: BanditInstance,
    delta: float,
    epsilon: float | None,
    beta: float,
    params: ThresholdParams,
    rng: RngStream,
    cap: int,
) -> RunResult:
    t0 = time.perf_counter()
    K = instance.K
    private = epsilon is not None
    rewards = rng.child(0)
    noise = rng.child(1) if private else None
    init_rewards, decision = _initial_episode_stats(instance, rewards, noise, epsilon)

    means = np.asarray(instance.means)
    thr = _threshold_table(delta, params, private)
    N = np.ones(K, dtype=np.int64)
    Nref = np.ones(K, dtype=np.int64)
    kk = np.ones(K, dtype=np.int64)
    Ntil = np.ones(K, dtype=np.int64)
    acc = np.zeros(K)
    mu = np.asarray(decision)
    invN = np.ones(K)
    L = np.zeros(K, dtype=np.int64)
    Nself = np.zeros(K, dtype=np.int64)
    Nmat = np.zeros(K * K, dtype=np.int64)
    S = np.zeros(_kernels.S_SIZE, dtype=np.int64)
    S[_kernels.S_N] = K + 1
    S[_kernels.S_LEADER_DIRTY] = 1
    S[_kernels.S_STOP_DIRTY] = 1
    S[_kernels.S_LAST_PULLED] = -1

    rew_buf = rewards.uniform_block(_REWARD_CHUNK)
    noise_buf = noise.uniform_block(_NOISE_CHUNK) if private else np.empty(0)
    eps_val = epsilon if private else 1.0
    while True:
        status = _kernels.adap_tt_kernel(
            means, eps_val, beta, thr, cap, 1 if private else 0,
            N, Nref, kk, Ntil, acc, mu, invN, L, Nself, Nmat, S, rew_buf, noise_buf,
        )
        if status == _kernels.NEED_REWARDS:
            rew_buf = rewards.uniform_block(_REWARD_CHUNK)
            S[_kernels.S_REW_POS] = 0
        elif status == _kernels.NEED_NOISE:
            noise_buf = noise.uniform_block(_NOISE_CHUNK)
            S[_kernels.S_NOISE_POS] = 0
        else:
            return _finish(
                algo, instance, S[_kernels.S_TAU], S[_kernels.S_RECOMMENDED],
                rng, N, status == _kernels.CAPPED, t0,
            )


def _reference_adaptive(
    algo: str,
    instance: BanditInstance,
    delta: float,
    epsilon: float | None,
    beta: float,
    params: ThresholdParams,
    rng: RngStream,
    cap: int,
) -> RunResult:
    """Trace-recording replay of the kernel's round structure."""
    t0 = time.perf_counter()
    K = instance.K
    private = epsilon is not None
    rewards = rng.child(0)
    noise = rng.child(1) if private else None
    init_rewards, decision = _initial_episode_stats(instance, rewards, noise, epsilon)

    st = PhaseState.fresh(K)
    st.raw_means = list(init_rewards)
    st.private_means = list(decision)
    tr = TrackingState.fresh(K)
    trace = RunTrace(pulls=list(range(K)))
    for a in range(K):
        trace.episodes.append(
            Episode(arm=a, phase=1, start=a + 1, end=a + 1, count=1,
                    raw_mean=init_rewards[a], private_mean=decision[a])
        )
    pull_rounds: list[list[int]] = [[a + 1] for a in range(K)]

    stop_rule = should_stop if private else should_stop_nonprivate
    n = K + 1
    leader = -1
    leader_dirty = True
    stop_dirty = True
    last = -1
    dev_lo = dev_hi = 0.0
    while True:
        if last >= 0 and st.global_counts[last] >= 2 * st.switch_counts[last]:
            a = last
            st.phases[a] += 1
            ntil = st.global_counts[a] - st.switch_counts[a]
            st.local_counts[a] = ntil
            acc = st.accumulators[a]
            raw = acc.reward_sum / ntil
            st.raw_means[a] = raw
            if private:
                decision[a] = _clip01(privatize_episode_mean(acc, epsilon, noise))
            else:
                decision[a] = raw
            st.switch_times[a] = n
            window = pull_rounds[a][st.switch_counts[a]:]
            trace.episodes.append(
                Episode(arm=a, phase=st.phases[a], start=window[0], end=window[-1],
                        count=ntil, raw_mean=raw, private_mean=decision[a])
            )
            if st.global_counts[a] != 2 ** (st.phases[a] - 1) or (
                st.phases[a] >= 2 and ntil != 2 ** (st.phases[a] - 2)
            ):
                trace.doubling_ok = False
            st.switch_counts[a] = st.global_counts[a]
            st.accumulators[a] = EpisodeAccumulator(arm=a, phase=st.phases[a] + 1)
            leader_dirty = True
            stop_dirty = True

        if stop_dirty:
            stopped, cand = stop_rule(decision, st.local_counts, st.phases, delta, params)
            if stopped:
                st.private_means = decision
                return _finish(algo, instance, n, cand, rng, st.global_counts, False, t0, trace)
            stop_dirty = False

        if n > cap:
            rec = _argmax_first(decision)
            st.private_means = decision
            return _finish(algo, instance, n, rec, rng, st.global_counts, True, t0, trace)

        if leader_dirty:
            if private:
                leader = select_private_leader(decision, st.phases, st.local_counts, epsilon)
            else:
                leader = select_nonprivate_leader(decision, st.phases, st.local_counts)
            leader_dirty = False

        challenger = select_challenger(decision, st.global_counts, leader)
        tr.leader_counts[leader] += 1
        pulled = leader if tracking_choice(tr, leader, beta) else challenger

        r = float(rewards.bernoulli(instance.means[pulled]))
        st.accumulators[pulled].add(r)
        st.global_counts[pulled] += 1
        tr.pair_counts[leader][pulled] += 1
        trace.pulls.append(pulled)
        trace.leaders.append(leader)
        pull_rounds[pulled].append(n)
        dev = tr.pair_counts[leader][leader] - beta * tr.leader_counts[leader]
        dev_lo = min(dev_lo, dev)
        dev_hi = max(dev_hi, dev)
        trace.tracking_dev_lo = dev_lo
        trace.tracking_dev_hi = dev_hi
        last = pulled
        n += 1


def run_adap_tt(
    instance: BanditInstance,
    delta: float,
    epsilon: float,
    beta: float = 0.5,
    *,
    params: ThresholdParams | None = None,
    rng: RngStream | None = None,
    seed: int = 0,
    stream: int = 0,
    cap: int = DEFAULT_CAP,
    record: bool = False,
) -> RunResult:
    """One AdaP-TT run to the private GLR stopping decision."""
    _validate_run_args(delta, beta, cap)
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    best_arm(instance)  # unique best arm required
    params = _resolve_params(instance, params, epsilon)
    rng = rng if rng is not None else RngStream(seed, stream)
    runner = _reference_adaptive if record else _run_adaptive_kernel
    return runner("adap-tt", instance, delta, epsilon, beta, params, rng, cap)


def run_adap_tt_nonprivate(
    instance: BanditInstance,
    delta: float,
    beta: float = 0.5,
    *,
    params: ThresholdParams | None = None,
    rng: RngStream | None = None,
    seed: int = 0,
    stream: int = 0,
    cap: int = DEFAULT_CAP,
    record: bool = False,
) -> RunResult:
    """Non-private AdaP-TT: raw episode means and the non-private threshold."""
    _validate_run_args(delta, beta, cap)
    best_arm(instance)
    params = _resolve_params(instance, params, None)
    rng = rng if rng is not None else RngStream(seed, stream)
    runner = _reference_adaptive if record else _run_adaptive_kernel
    return runner("adap-tt-np", instance, delta, None, beta, params, rng, cap)


@lru_cache(maxsize=64)
def _ttucb_c0(delta: float, params: ThresholdParams) -> float:
    z = riemann_zeta(params.s)
    return 2.0 * c_gaussian(0.5 * math.log((params.K - 1) * z * z / delta))


def _reference_ttucb(
    instance: BanditInstance,
    delta: float,
    beta: float,
    params: ThresholdParams,
    rng: RngStream,
    cap: int,
) -> RunResult:
    t0 = time.perf_counter()
    K = instance.K
    rewards = rng.child(0)
    c0 = _ttucb_c0(delta, params)
    sums = [0.0] * K
    N = [1] * K
    for a in range(K):
        sums[a] = float(rewards.bernoulli(instance.means[a]))
    tr = TrackingState.fresh(K)
    trace = RunTrace(pulls=list(range(K)))
    n = K + 1
    dev_lo = dev_hi = 0.0
    while True:
        means_full = [sums[a] / N[a] for a in range(K)]
        cand = _argmax_first(means_full)
        stop = True
        for b in range(K):
            if b == cand:
                continue
            d = means_full[cand] - means_full[b]
            stat = d * d / (1.0 / N[cand] + 1.0 / N[b])
            thr = c0 + 2.0 * math.log(4.0 + math.log(N[cand]))
            thr += 2.0 * math.log(4.0 + math.log(N[b]))
            if stat < 2.0 * thr:
                stop = False
                break
        if stop:
            return _finish("ttucb", instance, n, cand, rng, N, False, t0, trace)
        if n > cap:
            return _finish("ttucb", instance, n, cand, rng, N, True, t0, trace)

        logn = math.log(n)
        leader = _argmax_first(
            [sums[a] / N[a] + math.sqrt(6.0 * logn / N[a]) for a in range(K)]
        )
        challenger = select_challenger(means_full, N, leader)
        tr.leader_counts[leader] += 1
        pulled = leader if tracking_choice(tr, leader, beta) else challenger
        r = float(rewards.bernoulli(instance.means[pulled]))
        sums[pulled] += r
        N[pulled] += 1
        tr.pair_counts[leader][pulled] += 1
        trace.pulls.append(pulled)
        trace.leaders.append(leader)
        dev = tr.pair_counts[leader][leader] - beta * tr.leader_counts[leader]
        dev_lo = min(dev_lo, dev)
        dev_hi = max(dev_hi, dev)
        trace.tracking_dev_lo = dev_lo
        trace.tracking_dev_hi = dev_hi
        n += 1


def run_ttucb(
    instance: BanditInstance,
    delta: float,
    beta: float = 0.5,
    *,
    params: ThresholdParams | None = None,
    rng: RngStream | None = None,
    seed: int = 0,
    stream: int = 0,
    cap: int = DEFAULT_CAP,
    record: bool = False,
) -> RunResult:
    """One TTUCB run on full-history statistics."""
    _validate_run_args(delta, beta, cap)
    best_arm(instance)
    params = _resolve_params(instance, params, None)
    rng = rng if rng is not None else RngStream(seed, stream)
    if record:
        return _reference_ttucb(instance, delta, beta, params, rng, cap)

    t0 = time.perf_counter()
    K = instance.K
    rewards = rng.child(0)
    means = np.asarray(instance.means)
    sums = np.zeros(K)
    N = np.ones(K, dtype=np.int64)
    for a in range(K):
        sums[a] = float(rewards.bernoulli(instance.means[a]))
    L = np.zeros(K, dtype=np.int64)
    Nself = np.zeros(K, dtype=np.int64)
    Nmat = np.zeros(K * K, dtype=np.int64)
    S = np.zeros(_kernels.S_SIZE, dtype=np.int64)
    S[_kernels.S_N] = K + 1
    c0 = _ttucb_c0(delta, params)
    rew_buf = rewards.uniform_block(_REWARD_CHUNK)
    while True:
        status = _kernels.ttucb_kernel(
            means, beta, c0, cap, N, sums, L, Nself, Nmat, S, rew_buf
        )
        if status == _kernels.NEED_REWARDS:
            rew_buf = rewards.uniform_block(_REWARD_CHUNK)
            S[_kernels.S_REW_POS] = 0
        else:
            return _finish(
                "ttucb", instance, S[_kernels.S_TAU], S[_kernels.S_RECOMMENDED],
                rng, N, status == _kernels.CAPPED, t0,
            )


def run_dp_se(
    instance: BanditInstance,
    delta: float,
    epsilon: float,
    *,
    rng: RngStream | None = None,
    seed: int = 0,
    stream: int = 0,
    cap: int = DEFAULT_CAP,
    record: bool = False,
) -> RunResult:
    """Successive elimination with doubling epochs and private epoch means.

    Epoch t samples each active arm R_t = 2^t times, privatizes the fresh
    epoch mean with Laplace(1/(eps R_t)) noise, and eliminates every arm whose
    private upper confidence bound falls below the best private lower bound;
    the confidence width is sqrt(log(8 K t^2 / delta)/(2 R_t)) +
    log(8 K t^2 / delta)/(eps R_t).  Stops when one arm remains; the stopping
    time is the total pull count.
    """
    _validate_run_args(delta, 0.5, cap)
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    best_arm(instance)
    rng = rng if rng is not None else RngStream(seed, stream)
    t0 = time.perf_counter()
    K = instance.K
    gen = rng.child(0).generator
    noise = rng.child(1)
    trace = RunTrace() if record else None

    active = list(range(K))
    counts = [0] * K
    total = 0
    t = 0
    capped = False
    priv = {a: 0.0 for a in active}
    while len(active) > 1:
        t += 1
        budget = 2**t
        if total + budget * len(active) > cap:
            capped = True
            break
        lvl = math.log(8.0 * K * t * t / delta)
        width = math.sqrt(lvl / (2.0 * budget)) + lvl / (epsilon * budget)
        priv = {}
        for a in active:
            hits = int(gen.binomial(budget, instance.means[a]))
            acc = EpisodeAccumulator(arm=a, phase=t, reward_sum=float(hits), local_count=budget)
            priv[a] = privatize_episode_mean(acc, epsilon, noise)
            counts[a] += budget
            total += budget
            if trace is not None:
                trace.episodes.append(
                    Episode(arm=a, phase=t, start=0, end=0, count=budget,
                            raw_mean=hits / budget, private_mean=priv[a])
                )
        best_lcb = max(priv[a] - width for a in active)
        active = [a for a in active if priv[a] + width >= best_lcb]
    if capped:
        rec = max(active, key=lambda a: (priv.get(a, 0.0), -a))
    else:
        rec = active[0]
    return _finish("dp-se", instance, max(total, 1), rec, rng, counts, capped, t0, trace)
