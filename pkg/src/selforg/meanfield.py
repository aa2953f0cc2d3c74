"""Mean-field (factorized) dynamics via a self-consistent sample ensemble.

The single-particle distribution is represented by M sample points whose
drift depends on the ensemble moments <cos X> and <P sin X>:

    force(X) = (2 delta nbar / N) [cos X + C] sin X,
    C = (N - 1) (<cos X'> - (eps beta_tilde / delta) <P' sin X'>),

where N is the physical atom number (M is a numerical knob, independent of
N). Friction and noise act per sample point, -(gamma_tilde/N) sin^2(X) P
and sin X sqrt(2 nbar / N) dW_i with independent increments: unlike the
N-body engine there is no shared noise mode here, which is exactly what the
factorized description discards.

The ensemble is seeded by tiling one sampled N-atom position configuration
(fresh Gaussian momenta per copy), so the initial moments carry the same
finite-N fluctuation that seeds the instability in the N-body runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, TrajectoryDivergedError
from .nbody import IntegratorConfig, check_stability, noise_amplitude
from .observables import RAW_FIELDS, state_row
from .params import ModelParams, derive_params
from .state import TWO_PI, PhaseState


@dataclass
class MfEnsemble:
    x: np.ndarray
    p: np.ndarray
    n_physical: int
    tau: float = 0.0

    def __post_init__(self):
        self.x = np.mod(np.asarray(self.x, dtype=np.float64), TWO_PI)
        self.p = np.asarray(self.p, dtype=np.float64).copy()
        if self.x.shape != self.p.shape or self.x.ndim != 1 or self.x.size < 1:
            raise ConfigError("x and p must be 1-d arrays of equal positive length")
        if self.n_physical < 1:
            raise ConfigError(f"n_physical must be >= 1, got {self.n_physical}")

    @property
    def m(self) -> int:
        return self.x.size

    @property
    def moments(self) -> tuple[float, float]:
        """Current (<cos X>, <P sin X>) of the sample ensemble."""
        return (
            float(np.mean(np.cos(self.x))),
            float(np.mean(self.p * np.sin(self.x))),
        )

    def copy(self) -> "MfEnsemble":
        return MfEnsemble(self.x.copy(), self.p.copy(), self.n_physical, self.tau)


def build_mf_ensemble(
    positions: np.ndarray,
    params: ModelParams,
    backend,
    samples: int = 10_000,
) -> MfEnsemble:
    """Tile one N-atom position sample up to ~`samples` points.

    The copy count is rounded so the ensemble size is an exact multiple of N;
    momenta are drawn fresh for every sample point.
    """
    n = params.n_atoms
    if positions.shape != (n,):
        raise ConfigError(f"positions must have shape ({n},)")
    reps = max(1, int(round(samples / n)))
    x = np.tile(positions, reps)
    d = derive_params(params)
    p = backend.normals(reps * n) * math.sqrt(d.sigma2_p)
    return MfEnsemble(x, p, n_physical=n)


def _collective(moments, params: ModelParams) -> float:
    d = derive_params(params)
    mc, mps = moments
    cross = params.eps * d.beta_tilde / params.delta
    return (params.n_atoms - 1) * (mc - cross * mps)


def mf_force(x, moments, params: ModelParams):
    """Mean-field drift at position(s) x for frozen ensemble moments."""
    x = np.asarray(x, dtype=float)
    scale = 2.0 * params.delta * params.nbar / params.n_atoms
    out = scale * (np.cos(x) + _collective(moments, params)) * np.sin(x)
    return float(out) if out.ndim == 0 else out


def _kernel_args(params: ModelParams, cfg: IntegratorConfig):
    d = derive_params(params)
    force_scale = 2.0 * params.delta * params.nbar / params.n_atoms
    cross = params.eps * d.beta_tilde / params.delta
    if cfg.gamma_on:
        g_over_n = d.gamma_tilde / params.n_atoms
        amp = noise_amplitude(params)
    else:
        g_over_n = 0.0
        amp = 0.0
    return force_scale, float(params.n_atoms - 1), cross, g_over_n, amp


def mf_step(ens: MfEnsemble, params: ModelParams, cfg: IntegratorConfig, backend) -> MfEnsemble:
    """Advance the sample ensemble by one step (moments frozen within it)."""
    out = ens.copy()
    s = np.sin(out.x)
    c = np.cos(out.x)
    force_scale, c1, cross, g_over_n, amp = _kernel_args(params, cfg)
    bad = backend.advance_meanfield(
        out.x, out.p, s, c, 1, cfg.dt, params.eps, force_scale, c1, cross,
        g_over_n, amp,
    )
    if bad:
        raise TrajectoryDivergedError(f"non-finite ensemble at tau={ens.tau + cfg.dt}")
    out.tau = ens.tau + cfg.dt
    return out


def run_mf_trajectory(
    ens: MfEnsemble,
    params: ModelParams,
    cfg: IntegratorConfig,
    record_steps: np.ndarray,
    backend,
) -> tuple[np.ndarray, MfEnsemble]:
    """Mean-field counterpart of nbody.run_trajectory (same row layout)."""
    record_steps = np.asarray(record_steps, dtype=np.int64)
    if record_steps.size < 1 or record_steps[0] != 0:
        raise ConfigError("record_steps must start at step 0")
    if np.any(np.diff(record_steps) <= 0):
        raise ConfigError("record_steps must be strictly increasing")
    check_stability(PhaseState(ens.x, ens.p, ens.tau), params, cfg)

    x = ens.x.copy()
    p = ens.p.copy()
    s = np.sin(x)
    c = np.cos(x)
    force_scale, c1, cross, g_over_n, amp = _kernel_args(params, cfg)

    rows = np.empty((record_steps.size, len(RAW_FIELDS)))
    rows[0] = state_row(x, p)
    done = 0
    for j in range(1, record_steps.size):
        n_steps = int(record_steps[j] - done)
        bad = backend.advance_meanfield(
            x, p, s, c, n_steps, cfg.dt, params.eps, force_scale, c1, cross,
            g_over_n, amp,
        )
        if bad:
            tau_fail = ens.tau + (done + bad) * cfg.dt
            raise TrajectoryDivergedError(f"non-finite ensemble at tau={tau_fail:.6g}")
        done = int(record_steps[j])
        rows[j] = state_row(x, p)
    return rows, MfEnsemble(x, p, ens.n_physical, ens.tau + done * cfg.dt)
