"""Comparison samplers: asynchronous GP Thompson sampling and random search."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular

from . import kernels

JITTER_START = 1e-8
JITTER_MAX = 1e-4

N_STARTS = 4
ITERS_PER_START = 50
# objective evaluations per golden-section line search
GOLDEN_EVALS = 8
# half-width of each line search in log space
LINE_RADIUS = 1.5

# log-space box for hyperparameters (inputs live in the unit cube, y is standardized)
LOG_LENGTHSCALE_BOUNDS = (math.log(1e-2), math.log(1e1))
LOG_SCALE_BOUNDS = (math.log(5e-2), math.log(2e1))
LOG_NOISE_BOUNDS = (math.log(1e-6), math.log(1.0))

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class GPNumericalError(RuntimeError):
    pass


def jittered_cholesky(K):
    """Lower Cholesky factor of ``K``, adding diagonal jitter up to ``JITTER_MAX``."""
    try:
        return cholesky(K, lower=True, check_finite=False), 0.0
    except np.linalg.LinAlgError:
        pass
    scale = max(float(np.mean(np.diag(K))), 1.0)
    jitter = JITTER_START
    while jitter <= JITTER_MAX * (1 + 1e-9):
        try:
            return cholesky(K + jitter * scale * np.eye(K.shape[0]), lower=True, check_finite=False), jitter
        except np.linalg.LinAlgError:
            jitter *= 10.0
    raise GPNumericalError(f"matrix of size {K.shape[0]} not positive definite after jitter {JITTER_MAX}")


def _unpack(theta, d):
    return np.exp(theta[:d]), math.exp(theta[d]), math.exp(theta[d + 1])


def _bounds(d):
    lo = np.array([LOG_LENGTHSCALE_BOUNDS[0]] * d + [LOG_SCALE_BOUNDS[0], LOG_NOISE_BOUNDS[0]])
    hi = np.array([LOG_LENGTHSCALE_BOUNDS[1]] * d + [LOG_SCALE_BOUNDS[1], LOG_NOISE_BOUNDS[1]])
    return lo, hi


def log_marginal_likelihood(theta, X, y):
    """GP log evidence at log-hyperparameters ``theta`` = (log ls_1..d, log scale, log noise)."""
    n, d = X.shape
    ls, scale, noise = _unpack(theta, d)
    K = kernels.sq_exp_sym(X, ls, scale)
    K[np.diag_indices_from(K)] += noise
    try:
        L, _ = jittered_cholesky(K)
    except GPNumericalError:
        return -math.inf
    alpha = cho_solve((L, True), y)
    return float(-0.5 * y @ alpha - np.log(np.diag(L)).sum() - 0.5 * n * math.log(2.0 * math.pi))


def _golden_max(f, a, b):
    """Maximize ``f`` on [a, b] with a fixed number of golden-section evaluations."""
    c = b - _INVPHI * (b - a)
    e = a + _INVPHI * (b - a)
    fc, fe = f(c), f(e)
    for _ in range(GOLDEN_EVALS - 2):
        if fc >= fe:
            b, e, fe = e, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + _INVPHI * (b - a)
            fe = f(e)
    return (c, fc) if fc >= fe else (e, fe)


def coordinate_ascent(f, theta0, lo, hi, iters):
    """Cyclic coordinate-wise golden-section ascent; only accepts improvements."""
    theta = np.array(theta0, dtype=np.float64)
    best = f(theta)
    p = theta.shape[0]
    for it in range(iters):
        c = it % p
        a = max(lo[c], theta[c] - LINE_RADIUS)
        b = min(hi[c], theta[c] + LINE_RADIUS)

        def along(v, c=c):
            t = theta.copy()
            t[c] = v
            return f(t)

        v, fv = _golden_max(along, a, b)
        if fv > best:
            theta[c] = v
            best = fv
    return theta, best


@dataclass
class GPModel:
    """Fitted SE-kernel GP on unit-cube inputs and standardized targets."""

    space: object
    lengthscales: np.ndarray
    scale: float
    noise: float
    X: np.ndarray  # unit-cube inputs
    y: np.ndarray  # standardized targets
    y_mean: float
    y_std: float
    chol: np.ndarray
    alpha: np.ndarray
    log_likelihood: float
    start_log_likelihoods: tuple = ()

    @property
    def d(self):
        return self.X.shape[1]

    def to_unit(self, P):
        return (np.asarray(P, dtype=np.float64) - self.space.low) / self.space.width

    def gram(self, A, B=None):
        if B is None:
            return kernels.sq_exp_sym(A, self.lengthscales, self.scale)
        return kernels.sq_exp_gram(A, B, self.lengthscales, self.scale)

    def posterior(self, P, full_cov=False):
        """Posterior mean (and covariance or variance) of the standardized latent function."""
        U = self.to_unit(np.atleast_2d(P))
        Ks = self.gram(self.X, U)
        mean = Ks.T @ self.alpha
        V = solve_triangular(self.chol, Ks, lower=True)
        if full_cov:
            cov = self.gram(U) - V.T @ V
            return mean, cov
        var = np.maximum(self.scale - (V * V).sum(axis=0), 0.0)
        return mean, var

    def predict(self, P):
        """Posterior mean in original units."""
        mean, _ = self.posterior(P)
        return self.y_mean + self.y_std * mean


def fit_gp(D, space, rng, warm_start=None):
    """Maximize the log marginal likelihood over ARD lengthscales, scale and noise.

    Multi-start: the first start is ``warm_start`` (or a default guess), the
    rest are uniform over the hyperparameter box.
    """
    if len(D) < 2:
        raise ValueError(f"fit_gp needs at least 2 observations, got {len(D)}")
    X = (np.asarray(D.X, dtype=np.float64) - space.low) / space.width
    y_raw = np.asarray(D.y, dtype=np.float64)
    y_mean = float(y_raw.mean())
    y_std = float(y_raw.std())
    if not y_std > 0.0:
        y_std = 1.0
    y = (y_raw - y_mean) / y_std
    d = X.shape[1]
    lo, hi = _bounds(d)

    if warm_start is None:
        warm_start = np.concatenate([np.full(d, math.log(0.5)), [0.0, math.log(1e-3)]])
    starts = [np.clip(warm_start, lo, hi)]
    for _ in range(N_STARTS - 1):
        starts.append(lo + rng.random(d + 2) * (hi - lo))

    f = lambda th: log_marginal_likelihood(th, X, y)  # noqa: E731
    best_theta, best_ll, start_lls = None, -math.inf, []
    for th0 in starts:
        th, ll = coordinate_ascent(f, th0, lo, hi, ITERS_PER_START)
        start_lls.append(f(th0))
        if ll > best_ll or best_theta is None:
            best_theta, best_ll = th, ll
    if not math.isfinite(best_ll):
        raise GPNumericalError("log marginal likelihood is not finite at any start")

    ls, scale, noise = _unpack(best_theta, d)
    K = kernels.sq_exp_sym(X, ls, scale)
    K[np.diag_indices_from(K)] += noise
    L, _ = jittered_cholesky(K)
    alpha = cho_solve((L, True), y)
    return GPModel(
        space=space, lengthscales=ls, scale=scale, noise=noise, X=X, y=y,
        y_mean=y_mean, y_std=y_std, chol=L, alpha=alpha,
        log_likelihood=best_ll, start_log_likelihoods=tuple(start_lls),
    )


def n_acq(d, j):
    # verbatim rule: max(...) means the sqrt term never exceeds the 2000 floor
    return int(math.floor(max(2000.0, min(5, d) * math.sqrt(min(j, 1000)))))


def thompson_propose(gp, space, j, rng, return_details=False):
    """Minimizer over uniform candidates of one joint posterior sample."""
    n = n_acq(space.d, j)
    cand = space.sample_uniform(rng, n)
    mean, cov = gp.posterior(cand, full_cov=True)
    L, _ = jittered_cholesky(cov)
    f = mean + L @ rng.standard_normal(n)
    i = int(np.argmin(f))
    if return_details:
        return cand[i], cand, f
    return cand[i]


def propose_random(space, rng):
    return space.sample_uniform(rng)


@dataclass
class ParallelTSSampler:
    """GP Thompson sampling driven by the simulator.

    Refits hyperparameters on every proposal, warm-starting from the previous fit.
    """

    n_startup: int = 10
    name: str = "parallel-ts"

    def __post_init__(self):
        self._theta = None

    def reset(self):
        self._theta = None

    def propose(self, D, space, rng):
        if len(D) < max(2, self.n_startup):
            return space.sample_uniform(rng)
        gp = fit_gp(D, space, rng, warm_start=self._theta)
        self._theta = np.concatenate([np.log(gp.lengthscales), [math.log(gp.scale), math.log(gp.noise)]])
        return thompson_propose(gp, space, len(D), rng)


@dataclass
class RandomSampler:
    name: str = "random"

    def propose(self, D, space, rng):
        return propose_random(space, rng)
