import argparse
import csv
import logging
import sys

from . import kernels
from .costbench import doubling_sizes, loglog_slope, proposal_cost
from .experiment import SAMPLERS, ConfigError, parse_config, run_experiment

log = logging.getLogger("asynctpe")


def _run(args):
    overrides = {
        "objective": args.objective,
        "sampler": args.sampler,
        "workers": args.workers,
        "budget": args.budget,
        "trials": args.trials,
        "gamma": args.gamma,
        "seed": args.seed,
        "out": args.out,
    }
    cfg = parse_config(args.config, overrides)
    if cfg.out is None:
        raise ConfigError("no output directory: set 'out' in the config or pass --out")
    log.info("running %d trial(s) of %s on %s (%s kernels)", cfg.n_trials, cfg.sampler, cfg.objective, kernels.backend())
    evals, times = run_experiment(cfg)
    print(f"final mean best {times.mean[-1]:.6g} +- {times.stderr[-1]:.3g} "
          f"(shortest trial {len(evals.grid)} evaluations); wrote {cfg.out}")
    return 0


def _bench(args):
    sizes = args.sizes or doubling_sizes(args.min_n, args.max_n)
    rows = proposal_cost(args.sampler, sizes, repeats=args.repeats, seed=args.seed, objective=args.objective)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n_observations", "seconds"])
        for n, sec in rows:
            w.writerow([n, repr(sec)])
    finally:
        if args.out:
            out.close()
    if len(rows) >= 2:
        log.info("log-log slope %.3f", loglog_slope(rows))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="asynctpe", description="Asynchronous parallel TPE experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a multi-trial simulated experiment")
    r.add_argument("--config", help="INI experiment config")
    r.add_argument("--objective")
    r.add_argument("--sampler", choices=SAMPLERS)
    r.add_argument("--workers", type=int)
    r.add_argument("--budget", type=float, help="simulated seconds per trial")
    r.add_argument("--trials", type=int)
    r.add_argument("--gamma", type=float)
    r.add_argument("--seed", type=int, help="base seed; trial i uses seed + i")
    r.add_argument("--out", help="output directory")
    r.set_defaults(func=_run)

    b = sub.add_parser("bench-proposal-cost", help="time one proposal at growing |D|")
    b.add_argument("--sampler", choices=SAMPLERS, required=True)
    b.add_argument("--max-n", type=int, default=1000)
    b.add_argument("--min-n", type=int, default=200)
    b.add_argument("--sizes", type=int, nargs="+", help="explicit |D| values (overrides min/max)")
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--objective", default="hartmann18")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", help="CSV path (default: stdout)")
    b.set_defaults(func=_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
