"""Proposal wall-time as a function of the number of completed observations."""

import math
import time

import numpy as np

from .baselines import fit_gp, thompson_propose
from .benchmarks import get_objective
from .proposer import ObservationSet, ProposerConfig, propose, propose_classic_tpe


def doubling_sizes(min_n, max_n):
    sizes = []
    n = min_n
    while n <= max_n:
        sizes.append(n)
        n *= 2
    return sizes


def random_history(objective, n, rng):
    X = objective.space.sample_uniform(rng, n)
    D = ObservationSet()
    for x in X:
        D.append(x, objective.evaluate(objective.space.externalize(x)))
    return D


def _one_proposal(sampler, D, space, rng, cfg):
    if sampler == "async-tpe":
        propose(D, space, cfg, rng)
    elif sampler == "classic-tpe":
        propose_classic_tpe(D, space, cfg, rng)
    elif sampler == "parallel-ts":
        gp = fit_gp(D, space, rng)
        thompson_propose(gp, space, len(D), rng)
    elif sampler == "random":
        space.sample_uniform(rng)
    else:
        raise ValueError(f"unknown sampler {sampler!r}")


def proposal_cost(sampler, sizes, repeats=5, seed=0, objective="hartmann18", gamma=0.1):
    """Median seconds per proposal (GP fit included for parallel-ts) at each |D|."""
    obj = get_objective(objective)
    cfg = ProposerConfig(gamma=gamma)
    rng = np.random.default_rng(seed)
    # warm-up keeps JIT compilation out of the first measurement
    _one_proposal(sampler, random_history(obj, 20, rng), obj.space, rng, cfg)
    rows = []
    for n in sizes:
        D = random_history(obj, n, rng)
        times = []
        for _ in range(repeats):
            tic = time.perf_counter()
            _one_proposal(sampler, D, obj.space, rng, cfg)
            times.append(time.perf_counter() - tic)
        rows.append((n, float(np.median(times))))
    return rows


def loglog_slope(rows):
    """Least-squares slope of log(seconds) against log(n)."""
    n = np.array([math.log(r[0]) for r in rows])
    t = np.array([math.log(r[1]) for r in rows])
    return float(np.polyfit(n, t, 1)[0])
