"""Time the numba and numpy paths of each hot kernel side by side.

    python bench/bench_kernels.py [--repeats 20]

Prints one line per (kernel, size) with both timings, the speedup, and the
maximum relative disagreement between the two paths.
"""

import argparse
import time

import numpy as np

from asynctpe import kernels
from asynctpe.parzen import ParzenEstimator
from asynctpe.search_space import SearchSpace


def timeit(f, args, repeats):
    f(*args)  # compile / warm caches
    best = np.inf
    for _ in range(repeats):
        t = time.perf_counter()
        f(*args)
        best = min(best, time.perf_counter() - t)
    return best


def mixture_cases(rng):
    space = SearchSpace.unit_cube(18)
    for n_obs in (100, 400, 1600):
        est = ParzenEstimator.fit(rng.random((n_obs, 18)), space)
        for n_cand in (32, 1000):
            X = rng.random((n_cand, 18))
            yield f"mixture_logpdf d=18 m={n_obs + 1} N={n_cand}", (X, est.mus, est.sigmas, est.log_coefs)


def gram_cases(rng):
    for n in (200, 800):
        X = rng.random((n, 18))
        yield f"sq_exp_sym n={n} d=18", (X, np.full(18, 0.4), 1.3)
    X, Y = rng.random((800, 18)), rng.random((2000, 18))
    yield "sq_exp_gram 800x2000 d=18", (X, Y, np.full(18, 0.4), 1.3)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=20)
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    rows = []
    for label, a in mixture_cases(rng):
        rows.append((label, kernels.mixture_logpdf_numba, kernels.mixture_logpdf_numpy, a))
    for label, a in gram_cases(rng):
        nb = kernels.sq_exp_sym_numba if label.startswith("sq_exp_sym") else kernels.sq_exp_gram_numba
        npy = kernels.sq_exp_sym_numpy if label.startswith("sq_exp_sym") else kernels.sq_exp_gram_numpy
        rows.append((label, nb, npy, a))

    print(f"{'kernel':<40} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8} {'max rel diff':>13}")
    for label, nb, npy, a in rows:
        t_nb = timeit(nb, a, args.repeats)
        t_np = timeit(npy, a, args.repeats)
        r_nb, r_np = nb(*a), npy(*a)
        diff = np.max(np.abs(r_nb - r_np) / np.maximum(np.abs(r_np), 1e-300))
        print(f"{label:<40} {t_nb * 1e3:>10.3f} {t_np * 1e3:>10.3f} {t_np / t_nb:>8.2f} {diff:>13.2e}")


if __name__ == "__main__":
    main()
