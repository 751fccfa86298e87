"""Discrete-event simulation of asynchronous parallel workers.

Every worker that frees up immediately receives a new proposal computed from
the observations completed so far. Completion events are processed in
(t_end, worker id) order, so a trace is a pure function of the seed, the
configuration, the sampler and the objective.
"""

import csv
import heapq
import io
import time
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .proposer import ObservationSet

TRACE_COLUMNS = ("trial_index", "worker", "t_start", "t_end", "y", "best_y")


class SamplerError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    workers: int = 4
    budget_seconds: float = 500.0
    seed: int = 0
    # add measured proposal wall-time to the simulated clock (breaks determinism)
    charge_proposal_time: bool = False

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not self.budget_seconds > 0:
            raise ValueError("budget_seconds must be > 0")


@dataclass(frozen=True)
class TrialRecord:
    index: int
    x: np.ndarray
    x_external: np.ndarray
    y: float
    t_start: float
    t_end: float
    worker: int
    n_observed: int  # |D| seen by the proposal that produced this trial
    proposal_seconds: float = 0.0


@dataclass
class Trace:
    trials: List[TrialRecord]
    budget: float
    workers: int
    seed: int
    names: List[str] = field(default_factory=list)

    def __len__(self):
        return len(self.trials)

    @property
    def y(self):
        return np.array([t.y for t in self.trials])

    @property
    def t_end(self):
        return np.array([t.t_end for t in self.trials])

    def best_y(self):
        return np.minimum.accumulate(self.y) if self.trials else np.empty(0)

    def write_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(TRACE_COLUMNS) + list(self.names))
        best = self.best_y()
        for rec, b in zip(self.trials, best):
            row = [rec.index, rec.worker, repr(rec.t_start), repr(rec.t_end), repr(rec.y), repr(float(b))]
            row += [repr(float(v)) for v in rec.x_external]
            w.writerow(row)

    def to_csv(self):
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    def save(self, path):
        with open(path, "w", newline="") as fh:
            self.write_csv(fh)


def streams(seed):
    """Independent generators for proposals and durations."""
    proposal, duration = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(proposal), np.random.default_rng(duration)


def run(objective, sampler, cfg):
    space = objective.space
    prop_rng, dur_rng = streams(cfg.seed)
    if hasattr(sampler, "reset"):
        sampler.reset()
    D = ObservationSet()
    events = []  # (t_end, worker, dispatch_no)
    running = {}
    completed = []
    n_dispatched = 0
    master_free = 0.0

    def dispatch(worker, now):
        nonlocal n_dispatched, master_free
        if now >= cfg.budget_seconds:
            return
        n_obs = len(D)
        tic = time.perf_counter()
        try:
            x = np.asarray(sampler.propose(D, space, prop_rng), dtype=np.float64)
            space.validate(x)
        except Exception as exc:
            raise SamplerError(
                f"sampler {getattr(sampler, 'name', sampler)!r} failed on dispatch {n_dispatched} "
                f"(worker {worker}, t={now!r}, |D|={n_obs}): {exc}"
            ) from exc
        elapsed = time.perf_counter() - tic
        t_start = now
        if cfg.charge_proposal_time:
            t_start = max(now, master_free) + elapsed
            master_free = t_start
            if t_start >= cfg.budget_seconds:
                return
        x_ext = space.externalize(x)
        y = float(objective.evaluate(x_ext))
        dt = float(objective.duration(x_ext, dur_rng))
        if not dt > 0:
            raise ValueError(f"objective {objective.name!r} produced non-positive duration {dt}")
        t_end = t_start + dt
        running[worker] = (x, x_ext, y, t_start, n_obs, elapsed)
        heapq.heappush(events, (t_end, worker, n_dispatched))
        n_dispatched += 1

    for w in range(cfg.workers):
        dispatch(w, 0.0)

    while events:
        t_end, w, _ = heapq.heappop(events)
        x, x_ext, y, t_start, n_obs, elapsed = running.pop(w)
        if t_end > cfg.budget_seconds:
            continue  # in flight when the budget ran out
        completed.append(TrialRecord(len(completed), x, x_ext, y, t_start, t_end, w, n_obs, elapsed))
        D.append(x, y)
        dispatch(w, t_end)

    return Trace(completed, cfg.budget_seconds, cfg.workers, cfg.seed, space.names)


def best_so_far(trace, axis="evaluations"):
    """Running minimum as a step function ``(positions, values)``.

    ``axis="evaluations"`` puts completion counts 1..n on the x-axis;
    ``axis="time"`` uses completion times.
    """
    if not len(trace):
        raise ValueError("best_so_far needs a non-empty trace")
    values = trace.best_y()
    if axis == "evaluations":
        return np.arange(1, len(values) + 1), values
    if axis == "time":
        return trace.t_end, values
    raise ValueError(f"axis must be 'evaluations' or 'time', got {axis!r}")


def step_at(positions, values, query):
    """Evaluate a right-continuous step function; NaN before the first step."""
    idx = np.searchsorted(positions, query, side="right") - 1
    out = np.full(np.shape(query), np.nan)
    ok = idx >= 0
    out[ok] = values[idx[ok]]
    return out
