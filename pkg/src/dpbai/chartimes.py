"""Numerical solvers for lower-bound characteristic times.

Four quantities, in increasing generality:

* ``tv_char_time_closed_form`` -- the total-variation time, which has the
  closed form 1/gap_min + sum over suboptimal arms of 1/gap_a.
* ``kl_beta_char_time_gaussian`` -- the beta-constrained Gaussian time, solved
  by water-filling on the common transportation cost.
* ``kl_char_time_bernoulli`` -- the Bernoulli KL time, solved by entropic
  mirror ascent over the simplex of the concave min-over-arms objective.
* ``private_char_time`` -- the privacy-aware time whose inner objective is
  the pointwise min of the KL sum and 6*epsilon times the TV sum; the inner
  infimum splits into min(inner-KL, inner-TV) because an infimum of a
  pointwise min over a common feasible set equals the min of the infima.

``grid_oracle`` is an independent brute-force check: it scans a simplex
lattice and minimizes the inner objective by a dense scan over the common
alternative parameter x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bandit import BanditInstance, GapVector, best_arm, gaps
from .divergences import kl_bernoulli
from .errors import NonConvergence, TooManyArms, ZeroGap

_LAMBDA_CLAMP = 1e-9  # keeps alternative means inside (0,1), so KL stays finite
_TIE_TOL = 1e-12

DEFAULT_TOL = 1e-7
MAX_ITER = 100_000


@dataclass(frozen=True)
class Allocation:
    """Point on the probability simplex."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if any(x < -1e-12 for x in w):
            raise ValueError(f"negative weight in {w}")
        if abs(sum(w) - 1.0) > 1e-10:
            raise ValueError(f"weights sum to {sum(w)}, not 1")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights)


@dataclass(frozen=True)
class CharTimeReport:
    """Solved characteristic time with the allocation and solver diagnostics."""

    value: float
    allocation: Allocation
    solver: str
    iterations: int = 0
    residual: float = 0.0
    converged: bool = True


def tv_char_time_closed_form(gap_vector: GapVector) -> CharTimeReport:
    """Closed-form TV characteristic time 1/gap_min + sum_a 1/gap_a."""
    if gap_vector.min_gap <= 0.0:
        raise ZeroGap(f"non-positive minimum gap {gap_vector.min_gap}")
    b = gap_vector.best
    value = 1.0 / gap_vector.min_gap + sum(
        1.0 / g for i, g in enumerate(gap_vector.gaps) if i != b
    )
    # optimizer: omega_a / omega_best = gap_min / gap_a
    ratios = [1.0 if i == b else gap_vector.min_gap / g for i, g in enumerate(gap_vector.gaps)]
    total = sum(ratios)
    alloc = Allocation(tuple(r / total for r in ratios))
    return CharTimeReport(value=value, allocation=alloc, solver="closed-form")


def kl_beta_char_time_gaussian(
    gap_vector: GapVector, beta: float, tol: float = 1e-12, max_iter: int = 200
) -> CharTimeReport:
    """Beta-constrained Gaussian characteristic time via water-filling.

    Binary search on the common transportation cost c: given c, each
    suboptimal weight is omega_a(c) = 1/(gap_a^2/c - 1/beta), increasing in c,
    and the equilibrium c makes the suboptimal weights sum to 1 - beta.  At
    the solution all suboptimal costs gap_a^2/(1/beta + 1/omega_a) equal c,
    and the time is T = 2/c.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must be in (0, 1), got {beta}")
    if gap_vector.min_gap <= 0.0:
        raise ZeroGap(f"non-positive minimum gap {gap_vector.min_gap}")
    b = gap_vector.best
    sub = [(i, g) for i, g in enumerate(gap_vector.gaps) if i != b]

    def weight_sum(c: float) -> float:
        return sum(1.0 / (g * g / c - 1.0 / beta) for _, g in sub)

    lo, hi = 0.0, beta * gap_vector.min_gap**2
    c = 0.5 * hi
    for it in range(max_iter):
        c = 0.5 * (lo + hi)
        if weight_sum(c) < 1.0 - beta:
            lo = c
        else:
            hi = c
        if hi - lo <= tol * hi:
            break
    else:
        raise NonConvergence(f"water-fill bisection did not converge in {max_iter} iterations")

    raw = {i: 1.0 / (g * g / c - 1.0 / beta) for i, g in sub}
    scale = (1.0 - beta) / sum(raw.values())
    weights = [beta if i == b else raw[i] * scale for i in range(gap_vector.K)]
    costs = [g * g / (1.0 / beta + 1.0 / (raw[i] * scale)) for i, g in sub]
    residual = max(costs) - min(costs)
    return CharTimeReport(
        value=2.0 / c,
        allocation=Allocation(tuple(weights)),
        solver="water-fill",
        iterations=it + 1,
        residual=residual,
    )


def _clamp01(x: float) -> float:
    return min(max(x, _LAMBDA_CLAMP), 1.0 - _LAMBDA_CLAMP)


def _objective_and_supergradient(
    w: np.ndarray, means: tuple[float, ...], b: int, epsilon: float | None
) -> tuple[float, np.ndarray]:
    """Min-over-arms inner value at allocation w and one supergradient.

    Per suboptimal arm the inner KL infimum sits at the weighted mean of the
    two involved means (envelope theorem gives the gradient), and the inner
    TV infimum is min(w_b, w_a) * gap_a.  Arms tied at the minimum within
    1e-12 have their gradients averaged.
    """
    K = len(means)
    mu_b = means[b]
    vals: list[float] = []
    grads: list[np.ndarray] = []
    for a in range(K):
        if a == b:
            continue
        wa, wb = w[a], w[b]
        denom = wa + wb
        if denom <= 0.0:
            x = _clamp01(0.5 * (mu_b + means[a]))
        else:
            x = _clamp01((wb * mu_b + wa * means[a]) / denom)
        kl_b = kl_bernoulli(mu_b, x)
        kl_a = kl_bernoulli(means[a], x)
        v_kl = wb * kl_b + wa * kl_a
        g = np.zeros(K)
        g[b] = kl_b
        g[a] = kl_a
        if epsilon is not None:
            gap = mu_b - means[a]
            v_tv = 6.0 * epsilon * min(wb, wa) * gap
            if v_tv < v_kl - _TIE_TOL:
                v_kl = v_tv
                g = np.zeros(K)
                g[b if wb < wa else a] = 6.0 * epsilon * gap
            elif v_tv <= v_kl + _TIE_TOL:
                g_tv = np.zeros(K)
                g_tv[b if wb < wa else a] = 6.0 * epsilon * gap
                g = 0.5 * (g + g_tv)
                v_kl = min(v_kl, v_tv)
        vals.append(v_kl)
        grads.append(g)
    vmin = min(vals)
    active = [g for v, g in zip(vals, grads) if v <= vmin + _TIE_TOL]
    return vmin, sum(active) / len(active)


def _mirror_ascent(
    means: tuple[float, ...],
    b: int,
    epsilon: float | None,
    start: np.ndarray,
    tol: float,
    max_iter: int,
) -> tuple[float, np.ndarray, int, float, bool]:
    """Exponentiated-gradient ascent of the concave min objective on the simplex.

    Steps decay as 1/sqrt(t), normalized by the largest gradient magnitude
    seen so far; the best iterate is tracked and returned.  Convergence is
    declared when the best value improves by less than ``tol`` (relatively)
    over a 50-iteration window.
    """
    w = start.copy()
    best_v, best_w = -math.inf, w.copy()
    g_scale = 0.0
    window_v = -math.inf
    window = 50
    min_iters = 500
    for t in range(1, max_iter + 1):
        v, g = _objective_and_supergradient(w, means, b, epsilon)
        if v > best_v:
            best_v, best_w = v, w.copy()
        if t % window == 0:
            if t >= min_iters and best_v - window_v <= tol * max(abs(best_v), 1e-300):
                return best_v, best_w, t, best_v - window_v, True
            window_v = best_v
        g_scale = max(g_scale, float(np.max(np.abs(g))))
        if g_scale <= 0.0:
            break
        step = g * (1.0 / (g_scale * math.sqrt(t)))
        w = w * np.exp(step - np.max(step))
        w = np.maximum(w, 1e-300)
        w /= w.sum()
    v, _ = _objective_and_supergradient(w, means, b, epsilon)
    if v > best_v:
        best_v, best_w = v, w.copy()
    return best_v, best_w, max_iter, math.inf, False


def _solve_game(
    instance: BanditInstance, epsilon: float | None, tol: float, max_iter: int
) -> CharTimeReport:
    b = best_arm(instance)
    K = instance.K
    gv = gaps(instance)
    starts = [np.full(K, 1.0 / K)]
    starts.append(tv_char_time_closed_form(gv).allocation.as_array())
    starts.append(kl_beta_char_time_gaussian(gv, 0.5).allocation.as_array())
    best = None
    total_iters = 0
    any_converged = False
    for s in starts:
        v, w, iters, res, conv = _mirror_ascent(instance.means, b, epsilon, s, tol, max_iter)
        total_iters += iters
        any_converged = any_converged or conv
        if best is None or v > best[0]:
            best = (v, w, res)
    v, w, res = best
    if not any_converged:
        raise NonConvergence(f"mirror ascent hit the {max_iter}-iteration cap on every start")
    if v <= 0.0:
        raise NonConvergence("mirror ascent returned a non-positive objective")
    w = np.maximum(w, 0.0)
    w /= w.sum()
    solver = "mirror-ascent"
    return CharTimeReport(
        value=1.0 / v,
        allocation=Allocation(tuple(float(x) for x in w)),
        solver=solver,
        iterations=total_iters,
        residual=res,
    )


def kl_char_time_bernoulli(
    instance: BanditInstance, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER
) -> CharTimeReport:
    """Bernoulli KL characteristic time by mirror ascent over the simplex."""
    return _solve_game(instance, epsilon=None, tol=tol, max_iter=max_iter)


def private_char_time(
    instance: BanditInstance, epsilon: float, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER
) -> CharTimeReport:
    """Privacy-aware characteristic time with the min(KL, 6*eps*TV) objective."""
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return _solve_game(instance, epsilon=epsilon, tol=tol, max_iter=max_iter)


def _kl_curve(p: float, xs: np.ndarray) -> np.ndarray:
    out = np.zeros_like(xs)
    if p > 0.0:
        out += p * np.log(p / xs)
    if p < 1.0:
        out += (1.0 - p) * np.log((1.0 - p) / (1.0 - xs))
    return out


def _simplex_lattice(K: int, resolution: int) -> np.ndarray:
    points = []
    if K == 2:
        for i in range(resolution + 1):
            points.append((i, resolution - i))
    elif K == 3:
        for i in range(resolution + 1):
            for j in range(resolution + 1 - i):
                points.append((i, j, resolution - i - j))
    else:
        for i in range(resolution + 1):
            for j in range(resolution + 1 - i):
                for k in range(resolution + 1 - i - j):
                    points.append((i, j, k, resolution - i - j - k))
    return np.asarray(points, dtype=float) / resolution


def grid_oracle(
    instance: BanditInstance,
    epsilon: float | None = None,
    resolution: int = 100,
    measure: str = "kl",
) -> CharTimeReport:
    """Brute-force characteristic time on a simplex lattice.

    The outer allocation ranges over all lattice points with the given
    resolution; the inner minimization scans a dense grid of common
    alternative parameters x (augmented with the arm means, where the TV
    branch attains its kinks).  ``measure`` selects the pure KL or pure TV
    objective; passing ``epsilon`` overrides it with min(KL, 6*eps*TV).
    """
    if instance.K > 4:
        raise TooManyArms(f"grid oracle supports K <= 4, got K={instance.K}")
    if measure not in ("kl", "tv"):
        raise ValueError(f"measure must be 'kl' or 'tv', got {measure!r}")
    b = best_arm(instance)
    means = instance.means
    W = _simplex_lattice(instance.K, resolution)
    # pure TV branches are piecewise linear in x with kinks exactly at the
    # arm means, so a coarse uniform grid plus the means scans them exactly;
    # KL branches are smooth and need the full-density grid
    density = min(resolution, 64) if (measure == "tv" and epsilon is None) else resolution
    xs = np.linspace(0.0, 1.0, density + 1)[1:-1]
    interior = [m for m in means if 0.0 < m < 1.0]
    if interior:
        xs = np.union1d(xs, np.asarray(interior))
    F = np.full(W.shape[0], np.inf)
    for a in range(instance.K):
        if a == b:
            continue
        kl_b, kl_a = _kl_curve(means[b], xs), _kl_curve(means[a], xs)
        tv_b, tv_a = np.abs(means[b] - xs), np.abs(means[a] - xs)
        branch = np.full(W.shape[0], np.inf)
        chunk = 8192
        for lo in range(0, W.shape[0], chunk):
            hi = min(lo + chunk, W.shape[0])
            wb = W[lo:hi, b : b + 1]
            wa = W[lo:hi, a : a + 1]
            if epsilon is not None:
                vals = np.minimum(
                    wb * kl_b + wa * kl_a, 6.0 * epsilon * (wb * tv_b + wa * tv_a)
                )
            elif measure == "kl":
                vals = wb * kl_b + wa * kl_a
            else:
                vals = wb * tv_b + wa * tv_a
            branch[lo:hi] = vals.min(axis=1)
        np.minimum(F, branch, out=F)
    idx = int(np.argmax(F))
    value = float(F[idx])
    if value <= 0.0:
        raise NonConvergence("grid oracle found a non-positive objective everywhere")
    return CharTimeReport(
        value=1.0 / value,
        allocation=Allocation(tuple(W[idx])),
        solver="grid",
        iterations=W.shape[0],
        residual=1.0 / resolution,
    )


def regime_boundary(instance: BanditInstance) -> float:
    """Privacy-regime separator T*_TV / (6 T*_KL); privacy is free above it."""
    t_tv = tv_char_time_closed_form(gaps(instance)).value
    t_kl = kl_char_time_bernoulli(instance).value
    return t_tv / (6.0 * t_kl)
