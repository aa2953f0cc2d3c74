"""JIT-compiled inner loops.

All kernels consume the module-global legacy NumPy RNG that numba provides
inside nopython code; seed it through seed_rng() before use. Draw order is
part of the contract and mirrors _kernels_numpy exactly, so both backends
produce the same random sequences from the same seed.

No fastmath: summation order is fixed (Kahan for the collective sums) and
results must be reproducible run to run.
"""

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi


@njit(cache=True)
def seed_rng(seed):
    np.random.seed(seed)


@njit(cache=True)
def draw_normals(n):
    out = np.empty(n)
    for i in range(n):
        out[i] = np.random.normal()
    return out


@njit(cache=True)
def draw_uniforms(n):
    out = np.empty(n)
    for i in range(n):
        out[i] = np.random.random()
    return out


@njit(cache=True)
def _kahan_mean_cos(c):
    total = 0.0
    comp = 0.0
    for i in range(c.size):
        y = c[i] - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total / c.size


@njit(cache=True)
def advance_nbody(x, p, s, c, n_steps, dt, eps, force_coef, g_over_n, noise_amp, em):
    """Advance one N-body trajectory in place by n_steps.

    s and c must hold sin(x), cos(x) on entry and do so again on exit.
    force_coef = 2 delta nbar; g_over_n = gamma_tilde / N; noise_amp =
    sqrt(2 nbar / N). The dissipative part applies one shared Wiener
    increment per step through the rank-1 kernel sin X_i sin X_j.
    Returns 0 on success, or the 1-based step index where the state went
    non-finite.
    """
    n = x.size
    dissipative = g_over_n > 0.0 or noise_amp > 0.0
    sqrt_dt = math.sqrt(dt)
    drift = dt * 2.0 * eps
    half = 0.5 * dt * force_coef
    th = _kahan_mean_cos(c)
    for k in range(n_steps):
        if em:
            # Euler-Maruyama: every increment from the pre-step state.
            kick = dt * force_coef * th
            dkick = 0.0
            if dissipative:
                csum = 0.0
                comp = 0.0
                for i in range(n):
                    y = s[i] * p[i] - comp
                    t = csum + y
                    comp = (t - csum) - y
                    csum = t
                dw = np.random.normal() * sqrt_dt
                dkick = noise_amp * dw - dt * g_over_n * csum
            for i in range(n):
                xi = x[i] + drift * p[i]
                xi -= TWO_PI * math.floor(xi / TWO_PI)
                x[i] = xi
                p[i] += s[i] * (kick + dkick)
            th = 0.0
            comp = 0.0
            for i in range(n):
                s[i] = math.sin(x[i])
                ci = math.cos(x[i])
                c[i] = ci
                y = ci - comp
                t = th + y
                comp = (t - th) - y
                th = t
            th /= n
        else:
            # Velocity Verlet on the Hamiltonian part ...
            hk = half * th
            for i in range(n):
                p[i] += hk * s[i]
            th = 0.0
            comp = 0.0
            for i in range(n):
                xi = x[i] + drift * p[i]
                xi -= TWO_PI * math.floor(xi / TWO_PI)
                x[i] = xi
                s[i] = math.sin(xi)
                ci = math.cos(xi)
                c[i] = ci
                y = ci - comp
                t = th + y
                comp = (t - th) - y
                th = t
            th /= n
            hk = half * th
            for i in range(n):
                p[i] += hk * s[i]
            # ... then friction plus shared noise, frozen at the new positions.
            if dissipative:
                csum = 0.0
                comp = 0.0
                for i in range(n):
                    y = s[i] * p[i] - comp
                    t = csum + y
                    comp = (t - csum) - y
                    csum = t
                dw = np.random.normal() * sqrt_dt
                kick = noise_amp * dw - dt * g_over_n * csum
                for i in range(n):
                    p[i] += s[i] * kick
        if not math.isfinite(th):
            return k + 1
    return 0


@njit(cache=True)
def advance_meanfield(
    x, p, s, c, n_steps, dt, eps, force_scale, c1, cross, g_over_n, noise_amp
):
    """Advance the mean-field sample ensemble in place by n_steps.

    force_scale = 2 delta nbar / N, c1 = N - 1, cross = eps beta_tilde / delta.
    The collective coefficient is frozen across one whole step; friction and
    noise act per sample point with independent Wiener increments.
    Returns 0 on success or the 1-based failing step index.
    """
    m = x.size
    dissipative = g_over_n > 0.0 or noise_amp > 0.0
    sqrt_dt = math.sqrt(dt)
    drift = dt * 2.0 * eps
    half = 0.5 * dt * force_scale
    for k in range(n_steps):
        mc = 0.0
        mps = 0.0
        comp_c = 0.0
        comp_ps = 0.0
        for i in range(m):
            y = c[i] - comp_c
            t = mc + y
            comp_c = (t - mc) - y
            mc = t
            y = p[i] * s[i] - comp_ps
            t = mps + y
            comp_ps = (t - mps) - y
            mps = t
        mc /= m
        mps /= m
        if not (math.isfinite(mc) and math.isfinite(mps)):
            return k + 1
        cmf = c1 * (mc - cross * mps)
        for i in range(m):
            p[i] += half * (c[i] + cmf) * s[i]
            xi = x[i] + drift * p[i]
            xi -= TWO_PI * math.floor(xi / TWO_PI)
            x[i] = xi
            si = math.sin(xi)
            s[i] = si
            c[i] = math.cos(xi)
            p[i] += half * (c[i] + cmf) * si
        if dissipative:
            for i in range(m):
                si = s[i]
                dw = np.random.normal() * sqrt_dt
                p[i] += noise_amp * si * dw - dt * g_over_n * si * si * p[i]
    return 0


@njit(cache=True)
def metropolis_sweeps(x, n_sweeps, width, a_coef, theta_trace):
    """Single-site Metropolis on the position Gibbs weight exp(a Theta^2).

    a_coef = a = beta_tilde |delta| nbar N. Per sweep: N wrapped-Gaussian
    proposals of width `width`, one batch of normals and one of uniforms
    drawn up front (draw order shared with the numpy twin). theta_trace
    receives Theta after each sweep. Returns the accepted-move count.
    """
    n = x.size
    b = a_coef / (n * n)
    c = np.empty(n)
    for i in range(n):
        c[i] = math.cos(x[i])
    th_sum = 0.0
    comp = 0.0
    for i in range(n):
        y = c[i] - comp
        t = th_sum + y
        comp = (t - th_sum) - y
        th_sum = t
    accepted = 0
    for sweep in range(n_sweeps):
        zs = draw_normals(n)
        us = draw_uniforms(n)
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
        # refresh the running sum once per sweep
        th_sum = 0.0
        comp = 0.0
        for i in range(n):
            y = c[i] - comp
            t = th_sum + y
            comp = (t - th_sum) - y
            th_sum = t
        theta_trace[sweep] = th_sum / n
    return accepted
