"""Initial-state sampling from the thermal stationary distribution.

The stationary distribution factorizes into a Gaussian momentum part with
variance sigma2_p, sampled exactly, and a position part with Gibbs weight
exp(beta_tilde |delta| nbar N Theta^2), sampled by a single-site Metropolis
chain with wrapped-Gaussian proposals. The proposal width is adapted during
the first half of the burn-in and then frozen; the second half measures the
acceptance rate and the integrated autocorrelation time of Theta, and the
chain runs a few extra autocorrelation times before the final state is taken.

At nbar = 0 the weight is flat, every proposal is accepted, and the chain
endpoint is exactly uniform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SamplerConvergenceError
from .params import ModelParams, derive_params
from .state import TWO_PI, PhaseState

_WIDTH_MAX = math.pi
_WIDTH_MIN = 1e-3
_TARGET_ACCEPTANCE = 0.44


@dataclass(frozen=True)
class BurnDiagnostics:
    acceptance: float
    width: float
    tau_int: float
    sweeps: int
    converged: bool
    message: str = ""


def integrated_autocorr(series: np.ndarray) -> float:
    """Integrated autocorrelation time with a self-consistent window."""
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < 8:
        return 1.0
    x = x - x.mean()
    var = float(np.dot(x, x)) / n
    if var <= 0.0:
        return 1.0
    # FFT autocovariance, normalized to rho[0] = 1
    m = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, m)
    acf = np.fft.irfft(f * np.conjugate(f), m)[:n].real
    rho = acf / acf[0]
    tau = 1.0
    for k in range(1, n // 2):
        tau += 2.0 * rho[k]
        if k >= 5.0 * tau:
            break
    return max(tau, 1.0)


def _gibbs_coefficient(params: ModelParams) -> float:
    d = derive_params(params)
    return -d.beta_tilde * params.delta * params.nbar * params.n_atoms


def metropolis_burn(
    params: ModelParams,
    chain_sweeps: int,
    backend,
    width0: float = 1.0,
) -> tuple[np.ndarray, BurnDiagnostics]:
    """Run the adaptive burn-in and return (positions, diagnostics).

    Non-convergence is reported through the diagnostics, not raised; callers
    that need a valid sample check `converged`.
    """
    if chain_sweeps < 2:
        raise ConfigError(f"chain_sweeps must be >= 2, got {chain_sweeps}")
    n = params.n_atoms
    a_coef = _gibbs_coefficient(params)
    x = backend.uniforms(n) * TWO_PI

    adapt_sweeps = chain_sweeps // 2
    measure_sweeps = chain_sweeps - adapt_sweeps
    n_blocks = min(25, max(1, adapt_sweeps // 4))
    width = float(width0)

    done = 0
    for b in range(n_blocks):
        block = adapt_sweeps * (b + 1) // n_blocks - done
        done += block
        if block == 0:
            continue
        trace = np.empty(block)
        acc = backend.metropolis(x, block, width, a_coef, trace)
        rate = acc / (block * n)
        width *= math.exp(1.2 * (rate - _TARGET_ACCEPTANCE))
        width = min(max(width, _WIDTH_MIN), _WIDTH_MAX)

    trace = np.empty(measure_sweeps)
    acc = backend.metropolis(x, measure_sweeps, width, a_coef, trace)
    acceptance = acc / (measure_sweeps * n)
    tau_int = integrated_autocorr(trace)

    # A chain that accepts nearly everything at the maximum width is sampling
    # an (almost) flat weight, which is fine; high acceptance at a small width
    # or near-total rejection means the adaptation failed.
    converged = 0.1 <= acceptance <= 0.9 or (
        acceptance > 0.9 and width >= 0.95 * _WIDTH_MAX
    )
    msg = "" if converged else (
        f"acceptance {acceptance:.3f} at width {width:.4f} outside [0.1, 0.9]"
    )
    return x, BurnDiagnostics(
        acceptance=acceptance,
        width=width,
        tau_int=tau_int,
        sweeps=chain_sweeps,
        converged=converged,
        message=msg,
    )


def sample_equilibrium(
    params: ModelParams,
    backend,
    burn_sweeps: int | None = None,
    thin_factor: float = 2.0,
) -> PhaseState:
    """Draw one N-body state from the stationary distribution at `params`.

    Momenta are exact Gaussians with variance sigma2_p; positions come from
    the Metropolis chain after burn-in plus `thin_factor` autocorrelation
    times of extra decorrelation. Raises SamplerConvergenceError when the
    burn-in diagnostic fails.
    """
    n = params.n_atoms
    if burn_sweeps is None:
        burn_sweeps = 100 * n
    x, diag = metropolis_burn(params, burn_sweeps, backend)
    if not diag.converged:
        raise SamplerConvergenceError(diag.message)
    extra = int(math.ceil(thin_factor * diag.tau_int))
    if extra > 0:
        trace = np.empty(extra)
        backend.metropolis(x, extra, diag.width, _gibbs_coefficient(params), trace)
    d = derive_params(params)
    p = backend.normals(n) * math.sqrt(d.sigma2_p)
    return PhaseState(x, p, tau=0.0)
