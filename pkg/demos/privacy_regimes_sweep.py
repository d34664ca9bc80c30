"""Desk-scale reproduction of the stopping-time-vs-budget experiment.

Sweeps AdaP-TT, DP-SE, and TTUCB over a privacy-budget grid on a 5-armed
instance, writes the CSV outputs, and plots mean stopping time against the
budget with the regime separator and the theoretical lower-bound overlay.
The run count is reduced to keep this demo fast; bump ``RUNS`` for smoother
curves.
"""

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from dpbai import SweepConfig, run_sweep

RUNS = 10
OUT = Path("sweep_output")

config = SweepConfig(
    instance="mu1",
    algorithms=("adap-tt", "ttucb", "dp-se"),
    eps_grid=(0.05, 0.1, 0.2, 0.5, 1.0, 10.0),
    delta=0.01,
    runs=RUNS,
    seed=7,
    cap=30_000_000,
    out_dir=str(OUT),
)
records, summary = run_sweep(config)
print(f"wrote {len(records)} runs to {OUT}/runs.csv")
print(f"regime boundary eps* = {summary.eps_star:.4f} "
      f"(T*_KL = {summary.t_kl:.1f}, T*_TV = {summary.t_tv:.1f})")

# plots consume the CSV, not in-memory state
by_algo: dict[str, dict[float, tuple[float, float]]] = {}
with open(OUT / "summary.csv") as fh:
    for row in csv.DictReader(fh):
        by_algo.setdefault(row["algo"], {})[float(row["epsilon"])] = (
            float(row["mean_tau"]),
            float(row["std_tau"]),
        )

plt.figure(figsize=(7, 5))
for algo, cells in by_algo.items():
    eps = sorted(cells)
    mean = [cells[e][0] for e in eps]
    std = [cells[e][1] for e in eps]
    plt.errorbar(eps, mean, yerr=std, marker="o", ms=4, capsize=3, label=algo)
overlay_eps = sorted(summary.overlay)
plt.plot(overlay_eps, [summary.overlay[e] for e in overlay_eps],
         "k--", alpha=0.6, label="lower bound")
plt.axvline(summary.eps_star, color="gray", ls=":", label="eps*")
plt.xscale("log")
plt.yscale("log")
plt.xlabel("privacy budget eps")
plt.ylabel("stopping time")
plt.title(f"mu1, delta = {config.delta}, {RUNS} runs per cell")
plt.legend()
plt.tight_layout()
plt.savefig("privacy_regimes.png", dpi=120)
print("saved privacy_regimes.png")
