"""Command-line front end: sweep, chartime, and check subcommands.

Exit codes: 0 on success, 2 on configuration errors, 3 when a correctness
audit fails.
"""

from __future__ import annotations

import argparse
import os
import sys

from .algorithms import (
    DEFAULT_CAP,
    run_adap_tt,
    run_adap_tt_nonprivate,
    run_dp_se,
    run_ttucb,
)
from .bandit import BanditInstance, gaps
from .chartimes import (
    kl_char_time_bernoulli,
    private_char_time,
    tv_char_time_closed_form,
)
from .harness import ALGORITHMS, INSTANCES, SweepConfig, run_sweep

CONFIG_ERROR = 2
AUDIT_FAILED = 3


def _parse_instance(text: str) -> str | tuple[float, ...]:
    if text in INSTANCES:
        return text
    try:
        means = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"instance must be one of {sorted(INSTANCES)} or comma-separated means")
    return means


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpbai",
        description="Best-arm identification under pure differential privacy",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run an instance x algorithm x epsilon sweep")
    sweep.add_argument("--instance", required=True,
                       help=f"named instance ({', '.join(sorted(INSTANCES))}) or comma means")
    sweep.add_argument("--algo", required=True,
                       help=f"comma list from {', '.join(ALGORITHMS)}")
    sweep.add_argument("--eps", required=True, help="comma list of privacy budgets")
    sweep.add_argument("--delta", type=float, default=0.01)
    sweep.add_argument("--beta", type=float, default=0.5)
    sweep.add_argument("--runs", type=int, default=100)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--cap", type=int, default=DEFAULT_CAP)
    sweep.add_argument("--out", required=True, help="output directory for CSV/JSON")
    sweep.add_argument("--s", type=float, default=2.0, help="union-bound exponent s > 1")
    sweep.add_argument("--jobs", type=int, default=None, help="parallel worker processes")

    chart = sub.add_parser("chartime", help="print characteristic times for an instance")
    chart.add_argument("--instance", required=True)
    chart.add_argument("--eps", type=float, required=True)

    check = sub.add_parser("check", help="run property audits")
    check.add_argument("--suite", choices=("invariants", "correctness"), required=True)
    check.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_sweep(args) -> int:
    try:
        config = SweepConfig(
            instance=_parse_instance(args.instance),
            algorithms=tuple(a.strip() for a in args.algo.split(",")),
            eps_grid=tuple(float(e) for e in args.eps.split(",")),
            delta=args.delta,
            beta=args.beta,
            runs=args.runs,
            seed=args.seed,
            cap=args.cap,
            s=args.s,
            out_dir=args.out,
        )
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    records, summary = run_sweep(config, n_jobs=args.jobs)
    print(f"wrote {len(records)} runs and {len(summary.rows)} summary cells to {args.out}")
    print(f"regime boundary eps* = {summary.eps_star:.6g} "
          f"(T*_KL = {summary.t_kl:.6g}, T*_TV = {summary.t_tv:.6g})")
    for row in summary.rows:
        print(f"  {row['algo']:<10} eps={row['epsilon']:<8g} mean_tau={row['mean_tau']:<12.1f} "
              f"std={row['std_tau']:<10.1f} err={row['error_rate']:.3f} [{row['regime']}]")
    return 0


def _cmd_chartime(args) -> int:
    try:
        means = _parse_instance(args.instance)
        instance = BanditInstance(INSTANCES[means] if isinstance(means, str) else means)
        if args.eps <= 0:
            raise ValueError("eps must be positive")
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    g = gaps(instance)
    tv = tv_char_time_closed_form(g)
    kl = kl_char_time_bernoulli(instance)
    priv = private_char_time(instance, args.eps)
    eps_star = tv.value / (6.0 * kl.value)
    print(f"instance means        : {instance.means}")
    print(f"T*_TV   (closed form) : {tv.value:.6g}")
    print(f"T*_KL   ({kl.solver:<11}) : {kl.value:.6g}  [iters={kl.iterations}]")
    print(f"T*(nu;eps={args.eps:g})      : {priv.value:.6g}  [iters={priv.iterations}]")
    print(f"regime boundary eps*  : {eps_star:.6g}  -> eps={args.eps:g} is "
          f"{'high' if args.eps < eps_star else 'low'}-privacy")
    print(f"TV-optimal allocation : {tuple(round(w, 6) for w in tv.allocation.weights)}")
    print(f"KL-optimal allocation : {tuple(round(w, 6) for w in kl.allocation.weights)}")
    print(f"eps-optimal allocation: {tuple(round(w, 6) for w in priv.allocation.weights)}")
    return 0


def _cmd_check(args) -> int:
    failures = 0
    if args.suite == "invariants":
        instance = BanditInstance((0.9, 0.6, 0.3))
        for i in range(3):
            res = run_adap_tt(instance, delta=0.05, epsilon=1.0, seed=args.seed,
                              stream=i, record=True, cap=10**7)
            tr = res.trace
            ok_track = -0.5 <= tr.tracking_dev_lo and tr.tracking_dev_hi <= 1.0
            closed = {}
            ok_windows = True
            for ep in sorted(tr.episodes, key=lambda e: (e.arm, e.phase)):
                prev = closed.get(ep.arm)
                if prev is not None and ep.start <= prev:
                    ok_windows = False
                closed[ep.arm] = ep.end
            for check, ok in (("tracking", ok_track), ("doubling", tr.doubling_ok),
                              ("episode-windows", ok_windows)):
                status = "ok" if ok else "FAIL"
                print(f"invariants run {i}: {check:<16} {status}  (tau={res.stopping_time})")
                failures += 0 if ok else 1
    else:
        instance = BanditInstance((0.9, 0.6))
        delta, runs, allowed = 0.05, 50, 5
        cells = {
            "adap-tt": lambda s: run_adap_tt(instance, delta, 1.0, seed=args.seed, stream=s),
            "adap-tt-np": lambda s: run_adap_tt_nonprivate(instance, delta, seed=args.seed, stream=s),
            "ttucb": lambda s: run_ttucb(instance, delta, seed=args.seed, stream=s),
            "dp-se": lambda s: run_dp_se(instance, delta, 1.0, seed=args.seed, stream=s),
        }
        for name, fn in cells.items():
            errors = sum(0 if fn(s).correct else 1 for s in range(runs))
            ok = errors <= allowed
            print(f"correctness {name:<10}: {errors}/{runs} errors "
                  f"(allowed {allowed}) {'ok' if ok else 'FAIL'}")
            failures += 0 if ok else 1
    return AUDIT_FAILED if failures else 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "sweep":
        return _cmd_sweep(args)
    if args.command == "chartime":
        return _cmd_chartime(args)
    return _cmd_check(args)


if __name__ == "__main__":
    sys.exit(main())
