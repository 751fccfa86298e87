"""Density-ratio proposals from a gamma-quantile split of the observations.

``propose`` draws points from p(y < y* | x) by rejection sampling against a
uniform proposal; ``propose_classic_tpe`` picks the argmax of l(x) / g(x)
among candidates drawn from l, for contrast.
"""

import math
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.special import expit

from .parzen import ParzenEstimator

# candidates scored per vectorized batch inside the rejection loop
REJECTION_BLOCK = 32


@dataclass(frozen=True)
class Observation:
    x: np.ndarray
    y: float

    def __post_init__(self):
        if not math.isfinite(self.y):
            raise ValueError(f"observation value must be finite, got {self.y}")


class ObservationSet:
    """Append-only record of completed trials.

    Single writer: callers serialize ``append``; proposals read a snapshot.
    """

    def __init__(self, items=()):
        self._items: List[Observation] = []
        self._X = None
        self._y = np.empty(0)
        for ob in items:
            self.append(ob.x, ob.y)

    def append(self, x, y):
        x = np.array(x, dtype=np.float64)
        x.setflags(write=False)
        self._items.append(Observation(x, float(y)))
        n = len(self._items)
        if self._X is None:
            self._X = np.empty((16, x.shape[0]))
            self._y = np.empty(16)
        elif n > self._X.shape[0]:
            self._X = np.concatenate([self._X, np.empty_like(self._X)])
            self._y = np.concatenate([self._y, np.empty_like(self._y)])
        self._X[n - 1] = x
        self._y[n - 1] = y

    def __len__(self):
        return len(self._items)

    def __iter__(self):
        return iter(self._items)

    def __getitem__(self, i):
        return self._items[i]

    @property
    def items(self):
        return tuple(self._items)

    @property
    def X(self):
        """(n, d) copy of the observed points."""
        if self._X is None:
            return np.empty((0, 0))
        return self._X[: len(self)].copy()

    @property
    def y(self):
        return self._y[: len(self)].copy()

    def snapshot(self):
        return ObservationSet(self._items)


@dataclass(frozen=True)
class GammaSplit:
    below: tuple
    above: tuple
    y_star: float
    gamma: float


@dataclass(frozen=True)
class ProposerConfig:
    gamma: float = 0.1
    n_startup: int = 10
    max_rejection_attempts: int = 1000
    n_candidates_classic: int = 24

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        for name in ("n_startup", "max_rejection_attempts", "n_candidates_classic"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


def n_below(n, gamma):
    return max(1, math.ceil(gamma * n))


def split_indices(y, gamma):
    """Stable ascending order of ``y`` cut at the gamma quantile: (below_idx, above_idx)."""
    order = np.argsort(np.asarray(y, dtype=np.float64), kind="stable")
    k = n_below(len(order), gamma)
    return order[:k], order[k:]


def split(D, gamma):
    """Sort by y (ties keep insertion order) and cut at the gamma quantile."""
    if len(D) == 0:
        raise ValueError("cannot split an empty observation set")
    return _gamma_split(D, *split_indices(D.y, gamma), gamma)


def _gamma_split(D, lo, hi, gamma):
    below = tuple(D[i] for i in lo)
    above = tuple(D[i] for i in hi)
    y_star = above[0].y if above else math.inf
    return GammaSplit(below, above, y_star, gamma)


def success_probability(p, l, g, gamma):
    """gamma*l / (gamma*l + (1-gamma)*g), evaluated in log space.

    ``p`` may be a single point (returns float) or an (N, d) batch.
    """
    logit = l.log_pdf(p) - g.log_pdf(p) + math.log(gamma / (1.0 - gamma))
    out = expit(logit)
    return float(out) if np.ndim(out) == 0 else out


def fit_split(D, space, gamma):
    """Fit l on the below set and g on the above set; g is None when above is empty."""
    if len(D) == 0:
        raise ValueError("cannot split an empty observation set")
    lo, hi = split_indices(D.y, gamma)
    s = _gamma_split(D, lo, hi, gamma)
    X = D.X
    l = ParzenEstimator.fit(X[lo], space)
    g = ParzenEstimator.fit(X[hi], space) if hi.size else None
    return s, l, g


def rejection_sample(space, l, g, gamma, rng, max_attempts):
    """Uniform proposal, accept with probability p(y < y* | x).

    Candidates are scored in blocks; the first accepted one in draw order
    wins, so the result matches a one-at-a-time loop in distribution.
    Returns (point, attempts, accepted).
    """
    best_x, best_p = None, -1.0
    attempts = 0
    while attempts < max_attempts:
        b = min(REJECTION_BLOCK, max_attempts - attempts)
        cand = space.sample_uniform(rng, b)
        u = rng.random(b)
        prob = success_probability(cand, l, g, gamma)
        hit = np.nonzero(u < prob)[0]
        if hit.size:
            i = int(hit[0])
            return cand[i], attempts + i + 1, True
        j = int(np.argmax(prob))
        if prob[j] > best_p:
            best_x, best_p = cand[j], float(prob[j])
        attempts += b
    return best_x, attempts, False


def propose(D, space, cfg, rng):
    if len(D) < cfg.n_startup:
        return space.sample_uniform(rng)
    _, l, g = fit_split(D, space, cfg.gamma)
    if g is None:
        return space.sample_uniform(rng)
    x, _, _ = rejection_sample(space, l, g, cfg.gamma, rng, cfg.max_rejection_attempts)
    return x


def propose_classic_tpe(D, space, cfg, rng):
    if len(D) < cfg.n_startup:
        return space.sample_uniform(rng)
    _, l, g = fit_split(D, space, cfg.gamma)
    if g is None:
        return space.sample_uniform(rng)
    cand = l.sample(rng, cfg.n_candidates_classic)
    score = l.log_pdf(cand) - g.log_pdf(cand)
    return cand[int(np.argmax(score))]


@dataclass
class AsyncTPESampler:
    """Proposal strategy for the simulator: rejection sampling from p(y < y* | x)."""

    config: ProposerConfig = field(default_factory=ProposerConfig)
    name: str = "async-tpe"

    def propose(self, D, space, rng):
        return propose(D, space, self.config, rng)


@dataclass
class ClassicTPESampler:
    config: ProposerConfig = field(default_factory=ProposerConfig)
    name: str = "classic-tpe"

    def propose(self, D, space, rng):
        return propose_classic_tpe(D, space, self.config, rng)
