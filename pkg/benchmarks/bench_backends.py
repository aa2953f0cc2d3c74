#!/usr/bin/env python3
"""Benchmark the JIT kernels against the pure-NumPy fallback.

Times the three hot loops (N-body advance, mean-field advance, Metropolis
sweeps) under both backends with identical inputs and prints the speedups.

    python benchmarks/bench_backends.py [--n-atoms 50] [--steps 20000]
"""

import argparse
import math
import time

import numpy as np

from selforg import ModelParams, derive_params, noise_amplitude
from selforg.backend import get_backend


def _best_of(fn, repeats=3):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_nbody(backend, n, steps, dt):
    params = ModelParams(-1.0, 1 / 390, 1.0, n)
    d = derive_params(params)
    rng = np.random.RandomState(0)
    x = rng.uniform(0, 2 * np.pi, n)
    p = rng.normal(0, math.sqrt(d.sigma2_p), n)
    s, c = np.sin(x), np.cos(x)
    args = (dt, params.eps, 2 * params.delta * params.nbar,
            d.gamma_tilde / n, noise_amplitude(params), False)
    backend.seed(1)
    backend.advance_nbody(x, p, s, c, 50, *args)  # warm-up / JIT compile
    return _best_of(lambda: backend.advance_nbody(x, p, s, c, steps, *args))


def bench_meanfield(backend, m, steps, dt):
    n_phys = 50
    params = ModelParams(-1.0, 1 / 390, 1.0, n_phys)
    d = derive_params(params)
    rng = np.random.RandomState(0)
    x = rng.uniform(0, 2 * np.pi, m)
    p = rng.normal(0, math.sqrt(d.sigma2_p), m)
    s, c = np.sin(x), np.cos(x)
    args = (dt, params.eps, 2 * params.delta * params.nbar / n_phys,
            float(n_phys - 1), params.eps * d.beta_tilde / params.delta,
            d.gamma_tilde / n_phys, noise_amplitude(params))
    backend.seed(1)
    backend.advance_meanfield(x, p, s, c, 20, *args)
    return _best_of(lambda: backend.advance_meanfield(x, p, s, c, steps, *args))


def bench_metropolis(backend, n, sweeps):
    params = ModelParams(-1.0, 1 / 390, 1.0, n)
    a = -derive_params(params).beta_tilde * params.delta * params.nbar * n
    backend.seed(1)
    x = backend.uniforms(n) * 2 * np.pi
    trace = np.empty(sweeps)
    backend.metropolis(x, 50, 1.0, a, np.empty(50))
    return _best_of(lambda: backend.metropolis(x, sweeps, 1.0, a, trace))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-atoms", type=int, default=50)
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--mf-samples", type=int, default=2_000)
    ap.add_argument("--mf-steps", type=int, default=500)
    ap.add_argument("--sweeps", type=int, default=2_000)
    ap.add_argument("--dt", type=float, default=0.05)
    args = ap.parse_args()

    cases = [
        ("nbody advance", lambda be: bench_nbody(be, args.n_atoms, args.steps, args.dt),
         f"N={args.n_atoms}, {args.steps} steps"),
        ("meanfield advance", lambda be: bench_meanfield(be, args.mf_samples, args.mf_steps, args.dt),
         f"M={args.mf_samples}, {args.mf_steps} steps"),
        ("metropolis sweeps", lambda be: bench_metropolis(be, args.n_atoms, args.sweeps),
         f"N={args.n_atoms}, {args.sweeps} sweeps"),
    ]

    print(f"{'kernel':<20} {'numba':>10} {'numpy':>10} {'speedup':>9}   size")
    print("-" * 66)
    for name, fn, size in cases:
        t_numba = fn(get_backend("numba"))
        t_numpy = fn(get_backend("numpy"))
        print(f"{name:<20} {t_numba*1e3:>8.1f}ms {t_numpy*1e3:>8.1f}ms "
              f"{t_numpy/t_numba:>8.1f}x   {size}")


if __name__ == "__main__":
    main()
