"""Fixed-confidence best-arm identification under pure differential privacy.

A numpy/scipy library with four ingredients:

* Bernoulli bandit instances and reproducible counter-keyed random streams
  (:mod:`dpbai.bandit`).
* The Laplace mechanism calibrated to per-episode means and divergence
  helpers (:mod:`dpbai.laplace`, :mod:`dpbai.divergences`).
* The sequential strategies AdaP-TT, non-private AdaP-TT, TTUCB, and DP-SE
  with their GLR stopping thresholds (:mod:`dpbai.algorithms`,
  :mod:`dpbai.thresholds`).
* Characteristic-time solvers for the sample-complexity lower bounds and a
  sweep harness with a CLI (:mod:`dpbai.chartimes`, :mod:`dpbai.harness`).
"""

from .bandit import BanditInstance, GapVector, RngStream, best_arm, gaps, sample_reward
from .algorithms import (
    RunResult,
    run_adap_tt,
    run_adap_tt_nonprivate,
    run_dp_se,
    run_ttucb,
)
from .chartimes import (
    CharTimeReport,
    grid_oracle,
    kl_beta_char_time_gaussian,
    kl_char_time_bernoulli,
    private_char_time,
    regime_boundary,
    tv_char_time_closed_form,
)
from .harness import INSTANCES, SweepConfig, run_sweep
from .thresholds import ThresholdParams

__all__ = [
    "BanditInstance",
    "CharTimeReport",
    "GapVector",
    "INSTANCES",
    "RngStream",
    "RunResult",
    "SweepConfig",
    "ThresholdParams",
    "best_arm",
    "gaps",
    "grid_oracle",
    "kl_beta_char_time_gaussian",
    "kl_char_time_bernoulli",
    "private_char_time",
    "regime_boundary",
    "run_adap_tt",
    "run_adap_tt_nonprivate",
    "run_dp_se",
    "run_sweep",
    "run_ttucb",
    "sample_reward",
    "tv_char_time_closed_form",
]

__version__ = "0.1.0"
