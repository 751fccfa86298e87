"""Asynchronous parallel Bayesian optimization by rejection sampling from
tree-structured Parzen estimators, with baselines and a worker simulator."""

from .baselines import GPModel, ParallelTSSampler, RandomSampler, fit_gp, n_acq, thompson_propose
from .benchmarks import ObjectiveSpec, get_objective, halfnormal_duration, hartmann6, hartmann18
from .experiment import ExperimentConfig, parse_config, run_experiment
from .kernels import backend
from .parzen import ParzenEstimator
from .proposer import (
    AsyncTPESampler,
    ClassicTPESampler,
    ObservationSet,
    ProposerConfig,
    propose,
    propose_classic_tpe,
    split,
    success_probability,
)
from .search_space import DomainError, ParamDomain, SearchSpace, ShapeError
from .simulator import SimConfig, Trace, TrialRecord, best_so_far, run

__version__ = "0.1.0"
