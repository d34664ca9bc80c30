"""Numba inner loops for the sequential strategies.

The kernels are pure arithmetic: all randomness arrives as pre-drawn uniform
buffers (one stream for rewards, one for privacy noise), and all thresholds
arrive as precomputed tables, so a kernel run is bit-for-bit identical to the
pure-Python reference runner in ``algorithms.py``.  A kernel returns control
whenever a buffer runs dry and is re-entered with a fresh block; every piece
of loop state lives in the passed-in arrays.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# status codes returned by kernels
STOPPED = 0
CAPPED = 1
NEED_REWARDS = 2
NEED_NOISE = 3

# indices into the i64 scratch vector S
S_N = 0  # current round n
S_REW_POS = 1
S_NOISE_POS = 2
S_LEADER = 3
S_LEADER_DIRTY = 4
S_STOP_DIRTY = 5
S_LAST_PULLED = 6
S_TAU = 7
S_RECOMMENDED = 8
S_SIZE = 9


@njit(cache=True)
def _laplace_icdf(u: float, scale: float) -> float:
    v = u - 0.5
    w = 1.0 - 2.0 * abs(v)
    if w <= 0.0:
        w = 5e-324
    mag = -scale * math.log(w)
    return -mag if v < 0.0 else mag


@njit(cache=True)
def _argmax_first(vals) -> int:
    best = -math.inf
    idx = 0
    for i in range(vals.shape[0]):
        if vals[i] > best:
            best = vals[i]
            idx = i
    return idx


@njit(cache=True)
def adap_tt_kernel(
    means,  # f8[K] true means, for reward generation only
    epsilon,  # f8; ignored when private == 0
    beta,  # f8 tracking fraction
    thr,  # f8[KMAX, KMAX] stopping thresholds indexed by phase pair
    cap,  # i8 hard cap on the round index n
    private,  # i8 flag: 1 = private statistics, 0 = raw episode means
    N,  # i8[K] global pull counts
    Nref,  # i8[K] global count at the last phase switch
    kk,  # i8[K] phase indices
    Ntil,  # i8[K] local (last-phase) counts
    acc,  # f8[K] reward sums of the running episode
    mu_dec,  # f8[K] decision means: private when private=1, else raw episode means
    invN,  # f8[K] 1/N cache
    L,  # i8[K] leader counts
    Nself,  # i8[K] self-pull counts while leader
    Nmat,  # i8[K*K] (leader, pulled) pair counts, row-major
    S,  # i8[S_SIZE] scalar state
    rew,  # f8[:] uniform buffer for rewards
    noise,  # f8[:] uniform buffer for privacy noise
) -> int:
    K = means.shape[0]
    kmax = thr.shape[0] - 1
    n = S[S_N]
    rew_pos = S[S_REW_POS]
    noise_pos = S[S_NOISE_POS]
    while True:
        if rew_pos >= rew.shape[0]:
            S[S_N] = n
            S[S_REW_POS] = rew_pos
            S[S_NOISE_POS] = noise_pos
            return NEED_REWARDS
        if private == 1 and noise_pos >= noise.shape[0]:
            S[S_N] = n
            S[S_REW_POS] = rew_pos
            S[S_NOISE_POS] = noise_pos
            return NEED_NOISE

        # per-arm doubling: only the arm pulled last round can newly qualify
        lp = S[S_LAST_PULLED]
        if lp >= 0 and N[lp] >= 2 * Nref[lp]:
            kk[lp] += 1
            ntil = N[lp] - Nref[lp]
            Ntil[lp] = ntil
            raw = acc[lp] / ntil
            if private == 1:
                u = noise[noise_pos]
                noise_pos += 1
                priv = raw + _laplace_icdf(u, 1.0 / (epsilon * ntil))
                # decisions see the mean clipped to [0,1]: post-processing, so
                # privacy is intact, and |clip(m)-mu| <= |m-mu| keeps the
                # stopping calibration valid; unclipped short-episode means
                # (scale 1/(eps*Ntil)) would otherwise starve an arm for
                # ~(noise/gap)^2 rounds
                if priv < 0.0:
                    priv = 0.0
                elif priv > 1.0:
                    priv = 1.0
                mu_dec[lp] = priv
            else:
                mu_dec[lp] = raw
            Nref[lp] = N[lp]
            acc[lp] = 0.0
            S[S_LEADER_DIRTY] = 1
            S[S_STOP_DIRTY] = 1

        # GLR stopping: the statistics are fixed between phase switches, so
        # re-evaluating is only needed after a switch
        if S[S_STOP_DIRTY] == 1:
            cand = _argmax_first(mu_dec)
            stop = True
            for b in range(K):
                if b == cand:
                    continue
                d = mu_dec[cand] - mu_dec[b]
                stat = d * d / (1.0 / Ntil[cand] + 1.0 / Ntil[b])
                k1 = kk[cand] if kk[cand] < kmax else kmax
                k2 = kk[b] if kk[b] < kmax else kmax
                if stat < 2.0 * thr[k1, k2]:
                    stop = False
                    break
            if stop:
                S[S_N] = n
                S[S_REW_POS] = rew_pos
                S[S_NOISE_POS] = noise_pos
                S[S_TAU] = n
                S[S_RECOMMENDED] = cand
                return STOPPED
            S[S_STOP_DIRTY] = 0

        if n > cap:
            S[S_N] = n
            S[S_REW_POS] = rew_pos
            S[S_NOISE_POS] = noise_pos
            S[S_TAU] = n
            S[S_RECOMMENDED] = _argmax_first(mu_dec)
            return CAPPED

        # UCB leader, fixed between phase switches
        if S[S_LEADER_DIRTY] == 1:
            best = -math.inf
            B = 0
            for a in range(K):
                idx = mu_dec[a] + math.sqrt(kk[a] / Ntil[a])
                if private == 1:
                    idx += kk[a] / (epsilon * Ntil[a])
                if idx > best:
                    best = idx
                    B = a
            S[S_LEADER] = B
            S[S_LEADER_DIRTY] = 0
        B = S[S_LEADER]

        # transportation-cost challenger on global counts, adaptive per round
        bestc = math.inf
        C = -1
        for a in range(K):
            if a == B:
                continue
            c = (mu_dec[B] - mu_dec[a]) / math.sqrt(invN[B] + invN[a])
            if c < bestc:
                bestc = c
                C = a
        # tracking: leader count is incremented first, then compared
        L[B] += 1
        if Nself[B] <= beta * L[B]:
            I = B
        else:
            I = C

        u = rew[rew_pos]
        rew_pos += 1
        r = 1.0 if u < means[I] else 0.0
        acc[I] += r
        N[I] += 1
        invN[I] = 1.0 / N[I]
        if I == B:
            Nself[B] += 1
        Nmat[B * K + I] += 1
        S[S_LAST_PULLED] = I
        n += 1


@njit(cache=True)
def ttucb_kernel(
    means,  # f8[K]
    beta,  # f8
    c0,  # f8 constant part 2*C_G(...) of the stopping threshold
    cap,  # i8
    N,  # i8[K] counts (full history)
    sums,  # f8[K] reward sums (full history)
    L,  # i8[K]
    Nself,  # i8[K]
    Nmat,  # i8[K*K]
    S,  # i8[S_SIZE]
    rew,  # f8[:]
) -> int:
    K = means.shape[0]
    n = S[S_N]
    rew_pos = S[S_REW_POS]
    while True:
        if rew_pos >= rew.shape[0]:
            S[S_N] = n
            S[S_REW_POS] = rew_pos
            return NEED_REWARDS

        # full-history statistics move every round: evaluate stopping each time
        cand = 0
        best = -math.inf
        for a in range(K):
            m = sums[a] / N[a]
            if m > best:
                best = m
                cand = a
        mu_cand = sums[cand] / N[cand]
        stop = True
        for b in range(K):
            if b == cand:
                continue
            d = mu_cand - sums[b] / N[b]
            stat = d * d / (1.0 / N[cand] + 1.0 / N[b])
            thr = (
                c0
                + 2.0 * math.log(4.0 + math.log(N[cand]))
                + 2.0 * math.log(4.0 + math.log(N[b]))
            )
            if stat < 2.0 * thr:
                stop = False
                break
        if stop:
            S[S_N] = n
            S[S_REW_POS] = rew_pos
            S[S_TAU] = n
            S[S_RECOMMENDED] = cand
            return STOPPED

        if n > cap:
            S[S_N] = n
            S[S_REW_POS] = rew_pos
            S[S_TAU] = n
            S[S_RECOMMENDED] = cand
            return CAPPED

        logn = math.log(n)
        bestu = -math.inf
        B = 0
        for a in range(K):
            idx = sums[a] / N[a] + math.sqrt(6.0 * logn / N[a])
            if idx > bestu:
                bestu = idx
                B = a
        mu_B = sums[B] / N[B]
        bestc = math.inf
        C = -1
        for a in range(K):
            if a == B:
                continue
            c = (mu_B - sums[a] / N[a]) / math.sqrt(1.0 / N[B] + 1.0 / N[a])
            if c < bestc:
                bestc = c
                C = a
        L[B] += 1
        if Nself[B] <= beta * L[B]:
            I = B
        else:
            I = C

        u = rew[rew_pos]
        rew_pos += 1
        r = 1.0 if u < means[I] else 0.0
        sums[I] += r
        N[I] += 1
        if I == B:
            Nself[B] += 1
        Nmat[B * K + I] += 1
        n += 1
