"""Objective functions and simulated evaluation-time models."""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .search_space import INTEGER_ROUNDED, DomainError, ParamDomain, SearchSpace

# Hartmann 6-D constants, as tabulated in the Surjanovic & Bingham virtual
# simulation library (sfu.ca/~ssurjano/hart6.html).
HARTMANN6_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
HARTMANN6_A = np.array([
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
])
HARTMANN6_P = 1e-4 * np.array([
    [1312, 1696, 5569, 124, 8283, 5886],
    [2329, 4135, 8307, 3736, 1004, 9991],
    [2348, 1451, 3522, 2883, 3047, 6650],
    [4047, 8828, 8732, 5743, 1091, 381],
])
HARTMANN6_ARGMIN = np.array([0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573])
HARTMANN6_MIN = -3.32237

# half-normal scale whose mean is exactly one simulated second
UNIT_MEAN_SIGMA = math.sqrt(math.pi / 2.0)


def _check_unit(x, d):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != d:
        raise ValueError(f"expected {d} coordinates, got shape {x.shape}")
    if np.any(x < 0.0) or np.any(x > 1.0) or not np.all(np.isfinite(x)):
        raise DomainError(f"input must lie in [0, 1]^{d}")
    return x


def hartmann6(x):
    """Hartmann 6-D function on [0, 1]^6; accepts (6,) or (N, 6)."""
    x = _check_unit(x, 6)
    diff = x[..., None, :] - HARTMANN6_P
    inner = (HARTMANN6_A * diff * diff).sum(axis=-1)
    out = -(HARTMANN6_ALPHA * np.exp(-inner)).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def hartmann18(x):
    """Sum of :func:`hartmann6` over three consecutive 6-D blocks."""
    x = _check_unit(x, 18)
    return hartmann6(x[..., 0:6]) + hartmann6(x[..., 6:12]) + hartmann6(x[..., 12:18])


def halfnormal_duration(sigma, rng, size=None):
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return np.abs(rng.normal(0.0, sigma, size))


@dataclass(frozen=True)
class ObjectiveSpec:
    """An objective plus its simulated evaluation cost.

    ``evaluate`` and ``duration`` both receive the externalized point.
    """

    name: str
    space: SearchSpace
    evaluate: Callable
    duration: Callable


def _positive(t):
    # a draw of exactly zero would give a zero-length trial
    return max(float(t), 1e-12)


def _unit_halfnormal(x, rng):
    return _positive(halfnormal_duration(UNIT_MEAN_SIGMA, rng))


def hartmann6_objective():
    return ObjectiveSpec("hartmann6", SearchSpace.unit_cube(6), hartmann6, _unit_halfnormal)


def hartmann18_objective():
    return ObjectiveSpec("hartmann18", SearchSpace.unit_cube(18), hartmann18, _unit_halfnormal)


def mlp_space():
    """Six MLP hyperparameters (learning rate, momentum, two widths, two dropouts)."""
    return SearchSpace([
        ParamDomain("learning_rate", 1e-3, 0.2),
        ParamDomain("momentum", 0.8, 0.99),
        ParamDomain("n_hidden_1", 50, 500, INTEGER_ROUNDED),
        ParamDomain("n_hidden_2", 50, 500, INTEGER_ROUNDED),
        ParamDomain("dropout_1", 0.0, 0.8),
        ParamDomain("dropout_2", 0.0, 0.8),
    ])


def synthetic_mlp_surrogate(space=None, base_seconds=1.0):
    """Stand-in for validation error of a two-layer MLP.

    Value: ``0.12 + 0.025 * hartmann6(u)`` with ``u`` the point rescaled to the
    unit cube, so values sit in roughly [0.037, 0.12]. Duration:
    ``base_seconds * (n_hidden_1 + n_hidden_2) / 1000`` times unit-mean
    half-normal noise, so wider networks take proportionally longer.
    """
    space = mlp_space() if space is None else space
    if space.d != 6:
        raise ValueError("the MLP surrogate needs a 6-dimensional space")
    low, width = space.low.copy(), space.width.copy()
    i1, i2 = 2, 3

    def evaluate(x):
        u = np.clip((np.asarray(x, dtype=np.float64) - low) / width, 0.0, 1.0)
        return 0.12 + 0.025 * hartmann6(u)

    def duration(x, rng):
        size = (x[i1] + x[i2]) / 1000.0
        return _positive(base_seconds * size * halfnormal_duration(UNIT_MEAN_SIGMA, rng))

    return ObjectiveSpec("mlp-surrogate", space, evaluate, duration)


OBJECTIVES = {
    "hartmann18": hartmann18_objective,
    "hartmann6": hartmann6_objective,
    "mlp-surrogate": synthetic_mlp_surrogate,
}


def get_objective(name, space=None):
    try:
        factory = OBJECTIVES[name]
    except KeyError:
        raise KeyError(f"unknown objective {name!r}; valid: {sorted(OBJECTIVES)}") from None
    if space is None:
        return factory()
    if name == "mlp-surrogate":
        return factory(space)
    spec = factory()
    if space.d != spec.space.d or np.any(space.low < 0.0) or np.any(space.high > 1.0):
        raise ValueError(f"{name} requires a {spec.space.d}-dimensional space inside the unit cube")
    return ObjectiveSpec(name, space, spec.evaluate, spec.duration)
