"""Reproducible sweep harness: instance x algorithm x epsilon grids.

A sweep executes ``runs`` independent runs per cell, each on its own random
stream derived from (base seed, cell, run index), so results do not depend on
scheduling or worker count.  Outputs are a per-run CSV, a summary CSV, and a
machine-readable summary JSON; plotting is left to consumers of the CSVs.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .algorithms import (
    DEFAULT_CAP,
    RunResult,
    run_adap_tt,
    run_adap_tt_nonprivate,
    run_dp_se,
    run_ttucb,
)
from .bandit import BanditInstance
from .chartimes import kl_char_time_bernoulli, tv_char_time_closed_form
from .bandit import gaps
from .errors import EmptyCell
from .thresholds import ThresholdParams

# Bernoulli mean vectors of the six benchmark instances
INSTANCES: dict[str, tuple[float, ...]] = {
    "mu1": (0.95, 0.9, 0.9, 0.9, 0.5),
    "mu2": (0.75, 0.7, 0.7, 0.7, 0.7),
    "mu3": (0.0, 0.25, 0.5, 0.75, 1.0),
    "mu4": (0.75, 0.625, 0.5, 0.375, 0.25),
    "mu5": (0.75, 0.53125, 0.375, 0.28125, 0.25),
    "mu6": (0.75, 0.71875, 0.625, 0.46875, 0.25),
}

ALGORITHMS = ("adap-tt", "adap-tt-np", "ttucb", "dp-se")

DEFAULT_EPS_GRID = (
    0.001, 0.005, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 10.0,
)
# desk-scale preset: trims the grid to eps >= 0.05 to bound runtime
DESK_EPS_GRID = tuple(e for e in DEFAULT_EPS_GRID if e >= 0.05)

PER_RUN_COLUMNS = (
    "algo", "instance", "epsilon", "delta", "run_id", "seed",
    "stopping_time", "recommended_arm", "correct", "capped",
)
SUMMARY_COLUMNS = (
    "algo", "instance", "epsilon", "delta", "runs",
    "mean_tau", "std_tau", "error_rate", "regime",
)


@dataclass(frozen=True)
class SweepConfig:
    """Full specification of one sweep; identical configs give identical CSVs."""

    instance: str | tuple[float, ...]
    algorithms: tuple[str, ...]
    eps_grid: tuple[float, ...]
    delta: float = 0.01
    beta: float = 0.5
    runs: int = 100
    seed: int = 0
    cap: int = DEFAULT_CAP
    s: float = 2.0
    out_dir: str | None = None

    def __post_init__(self):
        if isinstance(self.instance, str):
            if self.instance not in INSTANCES:
                raise ValueError(f"unknown instance {self.instance!r}; known: {sorted(INSTANCES)}")
        else:
            object.__setattr__(self, "instance", tuple(float(m) for m in self.instance))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        object.__setattr__(self, "eps_grid", tuple(float(e) for e in self.eps_grid))
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {algo!r}; known: {ALGORITHMS}")
        if not self.algorithms:
            raise ValueError("need at least one algorithm")
        if not self.eps_grid or any(e <= 0 for e in self.eps_grid):
            raise ValueError("eps grid must be non-empty and positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must be in (0, 1), got {self.beta}")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")

    def means(self) -> tuple[float, ...]:
        return INSTANCES[self.instance] if isinstance(self.instance, str) else self.instance

    def label(self) -> str:
        if isinstance(self.instance, str):
            return self.instance
        return ",".join(repr(m) for m in self.instance)


def stream_id(algo: str, instance_label: str, eps_index: int, run_index: int) -> int:
    """Stable 64-bit stream id for one run cell; independent of scheduling."""
    text = f"{algo}|{instance_label}|{eps_index}|{run_index}"
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "big")


def _execute_run(task) -> dict:
    (algo, means, label, eps, eps_idx, run_id, seed, delta, beta, cap, s) = task
    instance = BanditInstance(means)
    sid = stream_id(algo, label, eps_idx, run_id)
    params = ThresholdParams(K=instance.K, s=s)
    if algo == "adap-tt":
        res = run_adap_tt(instance, delta, eps, beta, params=params,
                          seed=seed, stream=sid, cap=cap)
    elif algo == "adap-tt-np":
        res = run_adap_tt_nonprivate(instance, delta, beta, params=params,
                                     seed=seed, stream=sid, cap=cap)
    elif algo == "ttucb":
        res = run_ttucb(instance, delta, beta, params=params, seed=seed, stream=sid, cap=cap)
    elif algo == "dp-se":
        res = run_dp_se(instance, delta, eps, seed=seed, stream=sid, cap=cap)
    else:  # pragma: no cover - guarded by SweepConfig
        raise ValueError(algo)
    return _record(res, label, eps, delta, run_id)


def _record(res: RunResult, label: str, eps: float, delta: float, run_id: int) -> dict:
    return {
        "algo": res.algo,
        "instance": label,
        "epsilon": eps,
        "delta": delta,
        "run_id": run_id,
        "seed": res.seed,
        "stopping_time": res.stopping_time,
        "recommended_arm": res.recommended_arm,
        "correct": res.correct,
        "capped": res.capped,
    }


def run_sweep(config: SweepConfig, n_jobs: int | None = None):
    """Execute the sweep; returns (records, summary) and writes any outputs.

    Records come back sorted by (algorithm, epsilon index, run index) no
    matter how the parallel executor schedules them.
    """
    label = config.label()
    means = config.means()
    tasks = []
    for algo in config.algorithms:
        for eps_idx, eps in enumerate(config.eps_grid):
            for run_id in range(config.runs):
                tasks.append((algo, means, label, eps, eps_idx, run_id,
                              config.seed, config.delta, config.beta, config.cap, config.s))
    if n_jobs is None:
        n_jobs = os.cpu_count() or 1
    if n_jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            records = list(pool.map(_execute_run, tasks, chunksize=4))
    else:
        records = [_execute_run(t) for t in tasks]
    order = {algo: i for i, algo in enumerate(config.algorithms)}
    eps_order = {e: i for i, e in enumerate(config.eps_grid)}
    records.sort(key=lambda r: (order[r["algo"]], eps_order[r["epsilon"]], r["run_id"]))

    summary = summarize(records)
    summary = annotate_regimes(summary, BanditInstance(means), config.delta)
    if config.out_dir is not None:
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_per_run_csv(records, out / "runs.csv")
        write_summary_csv(summary, out / "summary.csv")
        write_summary_json(config, summary, out / "summary.json")
    return records, summary


@dataclass
class SweepSummary:
    """Per-cell aggregates plus instance-level regime annotations."""

    rows: list[dict]
    eps_star: float | None = None
    t_kl: float | None = None
    t_tv: float | None = None
    overlay: dict[float, float] | None = None


def summarize(records) -> SweepSummary:
    """Aggregate per-run records into per-(algo, instance, epsilon) rows."""
    if not records:
        raise EmptyCell("no records to summarize")
    cells: dict[tuple, list[dict]] = {}
    for r in records:
        cells.setdefault((r["algo"], r["instance"], r["epsilon"], r["delta"]), []).append(r)
    rows = []
    for (algo, label, eps, delta), recs in cells.items():
        if not recs:
            raise EmptyCell(f"empty cell {(algo, label, eps)}")
        taus = [r["stopping_time"] for r in recs]
        n = len(taus)
        mean = sum(taus) / n
        std = math.sqrt(sum((t - mean) ** 2 for t in taus) / (n - 1)) if n > 1 else 0.0
        errors = sum(1 for r in recs if not r["correct"])
        rows.append({
            "algo": algo,
            "instance": label,
            "epsilon": eps,
            "delta": delta,
            "runs": n,
            "mean_tau": mean,
            "std_tau": std,
            "error_rate": errors / n,
            "regime": "",
        })
    return SweepSummary(rows=rows)


def annotate_regimes(summary: SweepSummary, instance: BanditInstance, delta: float) -> SweepSummary:
    """Attach the regime separator and the theoretical lower-bound overlay.

    eps* = T*_TV / (6 T*_KL); cells with eps below it are in the high-privacy
    regime.  The overlay value at eps is max(T*_KL, T*_TV/(6 eps)) * log(1/(3 delta)).
    """
    t_tv = tv_char_time_closed_form(gaps(instance)).value
    t_kl = kl_char_time_bernoulli(instance).value
    eps_star = t_tv / (6.0 * t_kl)
    overlay = {}
    for row in summary.rows:
        eps = row["epsilon"]
        row["regime"] = "high" if eps < eps_star else "low"
        overlay[eps] = max(t_kl, t_tv / (6.0 * eps)) * math.log(1.0 / (3.0 * delta))
    summary.eps_star = eps_star
    summary.t_kl = t_kl
    summary.t_tv = t_tv
    summary.overlay = overlay
    return summary


def _format(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_per_run_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PER_RUN_COLUMNS)
        for r in records:
            w.writerow([_format(r[c]) for c in PER_RUN_COLUMNS])


def write_summary_csv(summary: SweepSummary, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_COLUMNS)
        for row in summary.rows:
            w.writerow([_format(row[c]) for c in SUMMARY_COLUMNS])


def write_summary_json(config: SweepConfig, summary: SweepSummary, path) -> None:
    doc = {
        "config": {
            "instance": config.label(),
            "means": list(config.means()),
            "algorithms": list(config.algorithms),
            "eps_grid": list(config.eps_grid),
            "delta": config.delta,
            "beta": config.beta,
            "runs": config.runs,
            "seed": config.seed,
            "cap": config.cap,
            "s": config.s,
        },
        "eps_star": summary.eps_star,
        "t_kl": summary.t_kl,
        "t_tv": summary.t_tv,
        "lower_bound_overlay": summary.overlay,
        "cells": summary.rows,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
