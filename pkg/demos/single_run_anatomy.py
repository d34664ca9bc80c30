"""Anatomy of one private run.

Runs AdaP-TT once with full trace recording and walks through what the
algorithm saw: the per-arm episode table (phase windows, raw vs private
means), the tracking deviations, and the final stopping decision.
"""

from dpbai import BanditInstance, run_adap_tt
from dpbai.thresholds import ThresholdParams, private_threshold
from dpbai.divergences import glr_statistic

instance = BanditInstance((0.8, 0.6, 0.4))
delta, epsilon = 0.05, 1.0

res = run_adap_tt(instance, delta, epsilon, seed=11, record=True)
trace = res.trace

print(f"instance means : {instance.means}")
print(f"stopped at tau = {res.stopping_time:,}, recommended arm {res.recommended_arm} "
      f"({'correct' if res.correct else 'WRONG'})")
print(f"final pull counts: {res.arm_counts}")
print()

print("episode table (means are forgotten at each phase switch):")
print(f"{'arm':>4} {'phase':>6} {'rounds':>19} {'count':>7} {'raw mean':>9} {'private':>9}")
for ep in sorted(trace.episodes, key=lambda e: (e.arm, e.phase)):
    window = f"[{ep.start:>7}, {ep.end:>7}]"
    print(f"{ep.arm:>4} {ep.phase:>6} {window:>19} {ep.count:>7} "
          f"{ep.raw_mean:>9.4f} {ep.private_mean:>9.4f}")

print()
print(f"tracking deviation N^a_a - beta*L_a stayed in "
      f"[{trace.tracking_dev_lo:.2f}, {trace.tracking_dev_hi:.2f}] (bound [-0.5, 1])")

# reconstruct the final stopping check from the last episode of each arm
last = {}
for ep in trace.episodes:
    last[ep.arm] = ep
cand = res.recommended_arm
params = ThresholdParams(K=instance.K, epsilon=epsilon)
print()
print("final GLR statistics vs twice the private threshold:")
for arm, ep in sorted(last.items()):
    if arm == cand:
        continue
    stat = glr_statistic(last[cand].private_mean, ep.private_mean,
                         last[cand].count, ep.count)
    thr = private_threshold(last[cand].phase, ep.phase, last[cand].count, ep.count,
                            delta, params)
    print(f"  arm {cand} vs arm {arm}: stat = {stat:10.2f}  >=  2*thr = {2 * thr:10.2f}"
          f"  ({'ok' if stat >= 2 * thr else 'not yet'})")
