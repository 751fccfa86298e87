"""Multi-trial experiments: config parsing, simulation runs, curve aggregation.

Config files use INI syntax; ``;`` and ``#`` start comments. One
``[experiment]`` section holds the run settings; optional ``[dim.<name>]``
sections replace the objective's whole search space, in file order, and must
match the dimension count the objective expects::

    [experiment]
    objective = hartmann18
    sampler = async-tpe
    workers = 4
    budget = 500
    trials = 10
    gamma = 0.1
    seed = 0
    out = results/h18-async

    # one section per dimension when overriding the space
    [dim.learning_rate]
    low = 0.001
    high = 0.2
    kind = continuous
"""

import configparser
import csv
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .baselines import ParallelTSSampler, RandomSampler
from .benchmarks import OBJECTIVES, get_objective
from .proposer import AsyncTPESampler, ClassicTPESampler, ProposerConfig
from .search_space import KINDS, ParamDomain, SearchSpace
from .simulator import SimConfig, best_so_far, run, step_at

SAMPLERS = ("async-tpe", "classic-tpe", "parallel-ts", "random")
TIME_GRID_POINTS = 200


class ConfigError(ValueError):
    pass


def make_sampler(name, gamma=0.1, n_startup=10):
    if name == "async-tpe":
        return AsyncTPESampler(ProposerConfig(gamma=gamma, n_startup=n_startup))
    if name == "classic-tpe":
        return ClassicTPESampler(ProposerConfig(gamma=gamma, n_startup=n_startup))
    if name == "parallel-ts":
        return ParallelTSSampler(n_startup=n_startup)
    if name == "random":
        return RandomSampler()
    raise ConfigError(f"unknown sampler {name!r}; valid: {list(SAMPLERS)}")


@dataclass(frozen=True)
class ExperimentConfig:
    objective: str
    sampler: str
    workers: int = 4
    budget_seconds: float = 500.0
    n_trials: int = 10
    gamma: float = 0.1
    base_seed: int = 0
    out: Optional[str] = None
    n_startup: int = 10
    charge_proposal_time: bool = False
    space: Optional[SearchSpace] = field(default=None, compare=False)

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"unknown objective {self.objective!r}; valid: {sorted(OBJECTIVES)}")
        if self.sampler not in SAMPLERS:
            raise ConfigError(f"unknown sampler {self.sampler!r}; valid: {list(SAMPLERS)}")
        if self.n_trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not self.budget_seconds > 0:
            raise ConfigError("budget must be > 0")
        if not 0 < self.gamma < 1:
            raise ConfigError("gamma must lie in (0, 1)")


# config key -> (ExperimentConfig field, converter)
_KEYS = {
    "objective": ("objective", str),
    "sampler": ("sampler", str),
    "workers": ("workers", int),
    "budget": ("budget_seconds", float),
    "trials": ("n_trials", int),
    "gamma": ("gamma", float),
    "seed": ("base_seed", int),
    "out": ("out", str),
    "n_startup": ("n_startup", int),
    "charge_proposal_time": ("charge_proposal_time", None),
}
_REQUIRED = ("objective", "sampler")
_DIM_KEYS = {"low", "high", "kind"}


def _to_bool(text):
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _convert(key, raw):
    fname, conv = _KEYS[key]
    try:
        return fname, (_to_bool(raw) if conv is None else conv(raw))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from None


def parse_config(path=None, overrides=None, text=None):
    """Build an :class:`ExperimentConfig` from a file plus overrides.

    ``overrides`` maps config keys (``workers``, ``budget`` ...) to values;
    ``None`` values are ignored, everything else beats the file.
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    if text is not None:
        parser.read_string(text)
    elif path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path) as fh:
            parser.read_file(fh)

    values = {}
    dims = []
    for section in parser.sections():
        if section == "experiment":
            for key, raw in parser.items(section):
                if key not in _KEYS:
                    raise ConfigError(f"unknown key {key!r} in [experiment]; valid: {sorted(_KEYS)}")
                fname, v = _convert(key, raw)
                values[fname] = v
        elif section.startswith("dim."):
            entry = dict(parser.items(section))
            unknown = set(entry) - _DIM_KEYS
            if unknown:
                raise ConfigError(f"unknown key(s) {sorted(unknown)} in [{section}]")
            missing = {"low", "high"} - set(entry)
            if missing:
                raise ConfigError(f"[{section}] is missing {sorted(missing)}")
            kind = entry.get("kind", "continuous")
            if kind not in KINDS:
                raise ConfigError(f"[{section}] kind must be one of {KINDS}")
            try:
                dims.append(ParamDomain(section[4:], float(entry["low"]), float(entry["high"]), kind))
            except ValueError as exc:
                raise ConfigError(f"[{section}]: {exc}") from None
        else:
            raise ConfigError(f"unknown section [{section}]")

    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        if key not in _KEYS:
            raise ConfigError(f"unknown override {key!r}")
        fname, v = _convert(key, raw)
        values[fname] = v

    missing = [k for k in _REQUIRED if _KEYS[k][0] not in values]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")
    if dims:
        values["space"] = SearchSpace(dims)
    try:
        cfg = ExperimentConfig(**values)
        if cfg.space is not None:
            get_objective(cfg.objective, cfg.space)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


@dataclass
class AggregateCurve:
    axis: str
    grid: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray

    def write_csv(self, path):
        label = "evaluations" if self.axis == "evaluations" else "time"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([label, "mean_best", "stderr"])
            for g, m, s in zip(self.grid, self.mean, self.stderr):
                g = int(g) if self.axis == "evaluations" else repr(float(g))
                w.writerow([g, repr(float(m)), repr(float(s))])


def _mean_stderr(M):
    mean = M.mean(axis=0)
    n = M.shape[0]
    if n < 2:
        return mean, np.zeros_like(mean)
    # shifting by one row keeps identical columns at exactly zero spread
    return mean, (M - M[0]).std(axis=0, ddof=1) / np.sqrt(n)


def aggregate(traces, budget):
    """Mean and standard error of best-so-far curves on shared grids.

    Evaluation grid: 1..(shortest trace length). Time grid: TIME_GRID_POINTS
    evenly spaced points in (0, budget]; points where any trial has not yet
    completed a trial are NaN.
    """
    n_min = min(len(t) for t in traces)
    if n_min == 0:
        raise ValueError("cannot aggregate an empty trace")
    E = np.array([best_so_far(t, "evaluations")[1][:n_min] for t in traces])
    em, es = _mean_stderr(E)
    evals = AggregateCurve("evaluations", np.arange(1, n_min + 1), em, es)

    grid = budget * np.arange(1, TIME_GRID_POINTS + 1) / TIME_GRID_POINTS
    T = np.array([step_at(*best_so_far(t, "time"), grid) for t in traces])
    tm, ts = _mean_stderr(T)
    times = AggregateCurve("time", grid, tm, ts)
    return evals, times


def run_trials(cfg, seeds=None):
    objective = get_objective(cfg.objective, cfg.space)
    seeds = [cfg.base_seed + i for i in range(cfg.n_trials)] if seeds is None else seeds
    traces = []
    for seed in seeds:
        sampler = make_sampler(cfg.sampler, cfg.gamma, cfg.n_startup)
        sim = SimConfig(cfg.workers, cfg.budget_seconds, seed, cfg.charge_proposal_time)
        traces.append(run(objective, sampler, sim))
    return traces


def run_experiment(cfg, seeds=None):
    """Run every trial, write CSVs under ``cfg.out`` (if set), return (evals, time) curves."""
    traces = run_trials(cfg, seeds)
    evals, times = aggregate(traces, cfg.budget_seconds)
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        for i, tr in enumerate(traces):
            tr.save(os.path.join(cfg.out, f"trace_{i}.csv"))
        evals.write_csv(os.path.join(cfg.out, "aggregate_evals.csv"))
        times.write_csv(os.path.join(cfg.out, "aggregate_time.csv"))
    return evals, times
