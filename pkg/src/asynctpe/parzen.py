"""Per-dimension truncated-Gaussian Parzen estimators.

Each dimension gets one kernel per observation plus a wide prior kernel at
the domain midpoint; the joint density is the product over dimensions.
"""

import numpy as np
from scipy.special import ndtr, ndtri

from . import kernels
from .search_space import DomainError

# bandwidths are clipped to [MIN_BANDWIDTH_FRAC * width, width]
MIN_BANDWIDTH_FRAC = 1e-3


def scott_bandwidth(values, width):
    """Scott-style bandwidth ``s * n**(-1/5)`` per column, clipped to the domain width.

    ``values`` is (n,) or (n, d) with ``width`` scalar or (d,). A single
    observation has no spread estimate and falls back to the full width;
    identical observations (zero spread) land on the clip floor.
    """
    values = np.asarray(values, dtype=np.float64)
    width = np.asarray(width, dtype=np.float64)
    n = values.shape[0]
    if n < 2:
        s = width * np.ones(values.shape[1:])
    else:
        s = values.std(axis=0, ddof=1)
    b = np.clip(s * n ** (-0.2), MIN_BANDWIDTH_FRAC * width, width)
    return float(b) if b.ndim == 0 else b


class ParzenEstimator:
    """Product of 1-D truncated-Gaussian mixtures over a :class:`SearchSpace`.

    Parameters are stored as (d, m) arrays with ``m = n + 1`` components per
    dimension; column ``m - 1`` is the prior component.
    """

    def __init__(self, space, mus, sigmas, weights):
        self.space = space
        self.mus = np.ascontiguousarray(mus, dtype=np.float64)
        self.sigmas = np.ascontiguousarray(sigmas, dtype=np.float64)
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)
        low = space.low[:, None]
        high = space.high[:, None]
        self._cdf_low = ndtr((low - self.mus) / self.sigmas)
        self._cdf_high = ndtr((high - self.mus) / self.sigmas)
        mass = self._cdf_high - self._cdf_low
        if np.any(mass <= 0.0):
            raise ValueError("a kernel has no probability mass inside its domain")
        self.log_coefs = np.ascontiguousarray(
            np.log(self.weights) - np.log(self.sigmas) - np.log(mass) - kernels._LOG_SQRT_2PI
        )
        for a in (self.mus, self.sigmas, self.weights, self.log_coefs):
            a.setflags(write=False)

    @property
    def n_components(self):
        return self.mus.shape[1]

    @classmethod
    def fit(cls, points, space):
        X = np.asarray(points, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, space.d)
        if X.shape[0] == 0:
            raise ValueError("cannot fit a Parzen estimator to zero points")
        X = space.validate(X)
        n, d = X.shape
        width = space.width
        mid = 0.5 * (space.low + space.high)

        mus = np.empty((d, n + 1))
        sigmas = np.empty((d, n + 1))
        mus[:, :n] = X.T
        mus[:, n] = mid
        sigmas[:, :n] = scott_bandwidth(X, width)[:, None]
        sigmas[:, n] = width
        weights = np.full((d, n + 1), 1.0 / (n + 1))
        return cls(space, mus, sigmas, weights)

    def log_pdf(self, p):
        """Log density at one point (scalar) or a batch of shape (N, d)."""
        arr = self.space.validate(p)
        if arr.ndim == 1:
            return float(kernels.mixture_logpdf(arr[None, :], self.mus, self.sigmas, self.log_coefs)[0])
        return kernels.mixture_logpdf(arr, self.mus, self.sigmas, self.log_coefs)

    def dim_pdf(self, k, x):
        """Density of dimension ``k`` alone at the 1-D array ``x``."""
        x = np.asarray(x, dtype=np.float64)
        z = (x[:, None] - self.mus[k]) / self.sigmas[k]
        return np.exp(self.log_coefs[k] - 0.5 * z * z).sum(axis=1)

    def sample(self, rng, size=None):
        """Draw from the mixture: pick a component, then inverse-CDF on its truncation."""
        n = 1 if size is None else size
        d, m = self.mus.shape
        out = np.empty((n, d))
        for k in range(d):
            cdf = np.cumsum(self.weights[k])
            idx = np.searchsorted(cdf, rng.random(n) * cdf[-1], side="right")
            idx = np.minimum(idx, m - 1)
            lo = self._cdf_low[k, idx]
            hi = self._cdf_high[k, idx]
            u = lo + rng.random(n) * (hi - lo)
            x = self.mus[k, idx] + self.sigmas[k, idx] * ndtri(u)
            out[:, k] = np.clip(x, self.space.low[k], self.space.high[k])
        return out[0] if size is None else out


def fit(points, space):
    return ParzenEstimator.fit(points, space)


def log_pdf(est, p):
    return est.log_pdf(p)


def sample(est, rng):
    return est.sample(rng)


__all__ = ["ParzenEstimator", "DomainError", "fit", "log_pdf", "sample", "scott_bandwidth"]
