"""How the GLR stopping thresholds grow.

Shows the non-private threshold as a function of the phase product, the
private threshold's Laplace correction across budgets, and the noise scale
the mechanism actually injects at each phase length.
"""

import math

from dpbai.laplace import episode_noise_scale
from dpbai.thresholds import (
    ThresholdParams,
    c_gaussian,
    nonprivate_threshold,
    private_threshold,
    riemann_zeta,
)

K, s, delta = 5, 2.0, 0.01
print(f"K = {K}, s = {s}, delta = {delta}, zeta(s) = {riemann_zeta(s):.6f}")
print(f"C_G(5) = {c_gaussian(5.0):.4f}   (roughly x + log x = {5 + math.log(5):.4f})")
print()

print("non-private threshold c_k(n, m, delta) along the doubling schedule:")
print(f"{'k':>3} {'n = m':>9} {'c_k':>9}")
params = ThresholdParams(K=K, s=s)
for k in (1, 2, 4, 8, 12, 16, 20):
    n = 1 if k == 1 else 2 ** (k - 2)
    print(f"{k:>3} {n:>9} {nonprivate_threshold(k * k, n, n, delta, params):>9.2f}")

print()
print("private threshold at phase k = 12 (n = m = 1024) across budgets,")
print("split into the doubled non-private part and the Laplace correction:")
base = 2 * nonprivate_threshold(144, 1024, 1024, delta / 2, params)
print(f"{'eps':>8} {'total':>10} {'2*c(d/2)':>10} {'correction':>11} {'noise scale':>12}")
for eps in (0.01, 0.05, 0.1, 0.5, 1.0, 10.0):
    p = ThresholdParams(K=K, s=s, epsilon=eps)
    total = private_threshold(12, 12, 1024, 1024, delta, p)
    print(f"{eps:>8} {total:>10.2f} {base:>10.2f} {total - base:>11.2f} "
          f"{episode_noise_scale(eps, 1024):>12.6f}")

print()
print("the correction term dominates only once eps falls well below "
      "sqrt((1/n + 1/m)) * log(2 K k^s zeta(s)/delta) / sqrt(2 c):")
for n in (64, 1024, 16384):
    k = int(math.log2(n)) + 2
    p0 = ThresholdParams(K=K, s=s)
    c = nonprivate_threshold(k * k, n, n, delta / 2, p0)
    lvl = math.log(2 * K * k**s * riemann_zeta(s) / delta)
    crossover = math.sqrt(2.0 / n) * lvl / math.sqrt(2 * c)
    print(f"  n = m = {n:>6}: crossover eps ~ {crossover:.4f}")
