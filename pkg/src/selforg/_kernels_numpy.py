"""Pure-NumPy fallback for the JIT kernels.

Mirrors _kernels_numba operation for operation, including the RNG draw
order, so the two backends yield the same random streams from the same
seed. Collective sums use np.sum (pairwise) instead of Kahan loops; the
backends are therefore equivalent only to rounding, not bit for bit.
"""

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def advance_nbody(
    rng, x, p, s, c, n_steps, dt, eps, force_coef, g_over_n, noise_amp, em
):
    n = x.size
    dissipative = g_over_n > 0.0 or noise_amp > 0.0
    sqrt_dt = math.sqrt(dt)
    drift = dt * 2.0 * eps
    half = 0.5 * dt * force_coef
    th = float(np.mean(c))
    for k in range(n_steps):
        if em:
            kick = dt * force_coef * th
            dkick = 0.0
            if dissipative:
                csum = float(np.dot(s, p))
                dw = rng.normal() * sqrt_dt
                dkick = noise_amp * dw - dt * g_over_n * csum
            x += drift * p
            np.mod(x, TWO_PI, out=x)
            p += s * (kick + dkick)
            np.sin(x, out=s)
            np.cos(x, out=c)
            th = float(np.mean(c))
        else:
            p += (half * th) * s
            x += drift * p
            np.mod(x, TWO_PI, out=x)
            np.sin(x, out=s)
            np.cos(x, out=c)
            th = float(np.mean(c))
            p += (half * th) * s
            if dissipative:
                csum = float(np.dot(s, p))
                dw = rng.normal() * sqrt_dt
                kick = noise_amp * dw - dt * g_over_n * csum
                p += s * kick
        if not math.isfinite(th):
            return k + 1
    return 0


def advance_meanfield(
    rng, x, p, s, c, n_steps, dt, eps, force_scale, c1, cross, g_over_n, noise_amp
):
    m = x.size
    dissipative = g_over_n > 0.0 or noise_amp > 0.0
    sqrt_dt = math.sqrt(dt)
    drift = dt * 2.0 * eps
    half = 0.5 * dt * force_scale
    for k in range(n_steps):
        mc = float(np.mean(c))
        mps = float(np.mean(p * s))
        if not (math.isfinite(mc) and math.isfinite(mps)):
            return k + 1
        cmf = c1 * (mc - cross * mps)
        p += half * (c + cmf) * s
        x += drift * p
        np.mod(x, TWO_PI, out=x)
        np.sin(x, out=s)
        np.cos(x, out=c)
        p += half * (c + cmf) * s
        if dissipative:
            dw = rng.normal(size=m) * sqrt_dt
            p += noise_amp * s * dw - dt * g_over_n * s * s * p
    return 0


def metropolis_sweeps(rng, x, n_sweeps, width, a_coef, theta_trace):
    n = x.size
    b = a_coef / (n * n)
    c = np.cos(x)
    th_sum = float(np.sum(c))
    accepted = 0
    for sweep in range(n_sweeps):
        zs = rng.normal(size=n)
        us = rng.random_sample(size=n)
        for i in range(n):
            prop = x[i] + width * zs[i]
            prop -= TWO_PI * math.floor(prop / TWO_PI)
            dc = math.cos(prop) - c[i]
            dlog = b * dc * (2.0 * th_sum + dc)
            if dlog >= 0.0 or us[i] < math.exp(dlog):
                x[i] = prop
                c[i] += dc
                th_sum += dc
                accepted += 1
        th_sum = float(np.sum(c))
        theta_trace[sweep] = th_sum / n
    return accepted
