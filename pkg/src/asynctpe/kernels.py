"""Hot numeric kernels.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy version.
The public names bound at import time point at the numba version unless
numba is missing or ``ASYNCTPE_DISABLE_NUMBA`` is set to a truthy value.
Both versions stay importable (``*_numpy`` / ``*_numba``) so tests and the
benchmark script can compare them directly.
"""

import os

import numpy as np

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)

# rows of the candidate block processed at once by the numpy path
_NUMPY_CHUNK = 256


def _env_disabled():
    flag = os.environ.get("ASYNCTPE_DISABLE_NUMBA", "")
    return flag.strip().lower() in ("1", "true", "yes", "on")


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _env_disabled()


# ---------------------------------------------------------------------------
# product of per-dimension truncated-Gaussian mixtures
# ---------------------------------------------------------------------------


def mixture_logpdf_numpy(X, mus, sigmas, log_coefs):
    """Sum over dimensions of log mixture densities.

    X has shape (N, d); mus, sigmas, log_coefs have shape (d, m) where
    ``log_coefs`` already folds in the log weight, the truncation normalizer,
    ``-log(sigma)`` and ``-log(sqrt(2 pi))``.
    """
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    out = np.zeros(n)
    for start in range(0, n, _NUMPY_CHUNK):
        xb = X[start:start + _NUMPY_CHUNK]
        acc = np.zeros(xb.shape[0])
        for k in range(d):
            z = (xb[:, k, None] - mus[k]) / sigmas[k]
            a = log_coefs[k] - 0.5 * z * z
            amax = a.max(axis=1)
            acc += amax + np.log(np.exp(a - amax[:, None]).sum(axis=1))
        out[start:start + xb.shape[0]] = acc
    return out


def sq_exp_gram_numpy(X, Y, lengthscales, scale):
    """ARD squared-exponential cross-covariance ``scale * exp(-r^2 / 2)``."""
    A = np.asarray(X, dtype=np.float64) / lengthscales
    B = np.asarray(Y, dtype=np.float64) / lengthscales
    sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * (A @ B.T)
    np.maximum(sq, 0.0, out=sq)
    return scale * np.exp(-0.5 * sq)


def sq_exp_sym_numpy(X, lengthscales, scale):
    """Square Gram matrix of ``X`` with itself, bitwise symmetric."""
    K = sq_exp_gram_numpy(X, X, lengthscales, scale)
    upper = np.triu(K)
    K = upper + np.triu(upper, 1).T
    np.fill_diagonal(K, scale)
    return K


if HAVE_NUMBA:

    # exp(t) for t in [-700, 0]: Cody-Waite reduction to |r| <= ln2/2, degree-13
    # Taylor polynomial (truncation < 1e-17), 2**q assembled from exponent bits.
    # Branch-free so LLVM vectorizes it; libm exp does not vectorize without SVML.
    _LOG2E = 1.4426950408889634
    _LN2_HI = 6.93147180369123816490e-01
    _LN2_LO = 1.90821492927058770002e-10
    # below this a dimension's scaled sum is recomputed with the two-pass method
    _TINY = 1e-280

    @numba.njit(inline="always")
    def _exp_poly(r):
        e = 1.0 / 6227020800.0
        e = e * r + 1.0 / 479001600.0
        e = e * r + 1.0 / 39916800.0
        e = e * r + 1.0 / 3628800.0
        e = e * r + 1.0 / 362880.0
        e = e * r + 1.0 / 40320.0
        e = e * r + 1.0 / 5040.0
        e = e * r + 1.0 / 720.0
        e = e * r + 1.0 / 120.0
        e = e * r + 1.0 / 24.0
        e = e * r + 1.0 / 6.0
        e = e * r + 0.5
        e = e * r + 1.0
        return e * r + 1.0

    @numba.njit(cache=True, nogil=True)
    def _logsumexp_row(x, mus, sigmas, log_coefs, k):
        m = mus.shape[1]
        amax = -np.inf
        for j in range(m):
            z = (x - mus[k, j]) / sigmas[k, j]
            v = log_coefs[k, j] - 0.5 * z * z
            if v > amax:
                amax = v
        s = 0.0
        for j in range(m):
            z = (x - mus[k, j]) / sigmas[k, j]
            s += np.exp(log_coefs[k, j] - 0.5 * z * z - amax)
        return amax + np.log(s)

    @numba.njit(cache=True, fastmath=True, nogil=True)
    def mixture_logpdf_numba(X, mus, sigmas, log_coefs):
        n, d = X.shape
        m = mus.shape[1]
        inv = 1.0 / sigmas
        bound = np.empty(d)
        for k in range(d):
            bound[k] = log_coefs[k].max()
        p = np.empty(m)
        bits = np.empty(m, dtype=np.int64)
        scale = bits.view(np.float64)
        out = np.zeros(n)
        for i in range(n):
            acc = 0.0
            for k in range(d):
                x = X[i, k]
                b = bound[k]
                for j in range(m):
                    z = (x - mus[k, j]) * inv[k, j]
                    t = max(log_coefs[k, j] - b - 0.5 * z * z, -700.0)
                    q = np.floor(t * _LOG2E + 0.5)
                    p[j] = _exp_poly((t - q * _LN2_HI) - q * _LN2_LO)
                    bits[j] = (np.int64(q) + 1023) << 52
                s = 0.0
                for j in range(m):
                    s += p[j] * scale[j]
                if s < _TINY:
                    acc += _logsumexp_row(x, mus, sigmas, log_coefs, k)
                else:
                    acc += b + np.log(s)
            out[i] = acc
        return out

    @numba.njit(inline="always")
    def _exp_nonpos_into(t, out, bits):
        """out[j] = exp(t[j]) for t <= 0, with the vectorizable polynomial."""
        scale = bits.view(np.float64)
        for j in range(t.shape[0]):
            v = max(t[j], -700.0)
            q = np.floor(v * _LOG2E + 0.5)
            out[j] = _exp_poly((v - q * _LN2_HI) - q * _LN2_LO)
            bits[j] = (np.int64(q) + 1023) << 52
        for j in range(t.shape[0]):
            out[j] *= scale[j]

    @numba.njit(cache=True, fastmath=True, nogil=True)
    def sq_exp_gram_numba(X, Y, lengthscales, scale):
        n, d = X.shape
        p = Y.shape[0]
        K = np.empty((n, p))
        inv = 1.0 / lengthscales
        t = np.empty(p)
        e = np.empty(p)
        bits = np.empty(p, dtype=np.int64)
        for i in range(n):
            for j in range(p):
                r2 = 0.0
                for k in range(d):
                    u = (X[i, k] - Y[j, k]) * inv[k]
                    r2 += u * u
                t[j] = -0.5 * r2
            _exp_nonpos_into(t, e, bits)
            for j in range(p):
                K[i, j] = scale * e[j]
        return K

    @numba.njit(cache=True, fastmath=True, nogil=True)
    def sq_exp_sym_numba(X, lengthscales, scale):
        n, d = X.shape
        K = np.empty((n, n))
        inv = 1.0 / lengthscales
        t = np.empty(n)
        e = np.empty(n)
        bits = np.empty(n, dtype=np.int64)
        for i in range(n):
            K[i, i] = scale
            w = n - i - 1
            for j in range(i + 1, n):
                r2 = 0.0
                for k in range(d):
                    u = (X[i, k] - X[j, k]) * inv[k]
                    r2 += u * u
                t[j - i - 1] = -0.5 * r2
            _exp_nonpos_into(t[:w], e[:w], bits[:w])
            for j in range(i + 1, n):
                v = scale * e[j - i - 1]
                K[i, j] = v
                K[j, i] = v
        return K

else:  # pragma: no cover
    mixture_logpdf_numba = None
    sq_exp_gram_numba = None
    sq_exp_sym_numba = None


if USE_NUMBA:
    _mixture_logpdf = mixture_logpdf_numba
    _sq_exp_gram = sq_exp_gram_numba
    _sq_exp_sym = sq_exp_sym_numba
else:
    _mixture_logpdf = mixture_logpdf_numpy
    _sq_exp_gram = sq_exp_gram_numpy
    _sq_exp_sym = sq_exp_sym_numpy


def backend():
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"


def mixture_logpdf(X, mus, sigmas, log_coefs):
    X = np.ascontiguousarray(X, dtype=np.float64)
    return _mixture_logpdf(X, mus, sigmas, log_coefs)


def sq_exp_gram(X, Y, lengthscales, scale):
    X = np.ascontiguousarray(X, dtype=np.float64)
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    ls = np.ascontiguousarray(lengthscales, dtype=np.float64)
    return _sq_exp_gram(X, Y, ls, float(scale))


def sq_exp_sym(X, lengthscales, scale):
    X = np.ascontiguousarray(X, dtype=np.float64)
    ls = np.ascontiguousarray(lengthscales, dtype=np.float64)
    return _sq_exp_sym(X, ls, float(scale))
