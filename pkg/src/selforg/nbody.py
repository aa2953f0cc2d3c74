"""N-body stochastic dynamics with the rank-1 collective dissipator.

The dimensionless equations of motion integrated here are

    dX_i = 2 eps P_i dtau
    dP_i = [2 delta nbar Theta sin X_i
            - (gamma_tilde/N) sin X_i sum_j sin X_j P_j] dtau
           + sin X_i sqrt(2 nbar / N) dW

with a single Wiener increment dW shared by all particles per step: the
diffusion matrix is the rank-1 outer product (2 nbar / N) sin X_i sin X_j,
so exactly one collective noise mode exists. Setting gamma_on=False removes
friction and noise together (the purely Hamiltonian comparison dynamics).

The default scheme is a velocity-Verlet step for the Hamiltonian part
followed by one dissipative substep with coefficients frozen at the new
positions; an Euler-Maruyama variant is kept as a cross-check oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, StabilityError, TrajectoryDivergedError
from .observables import RAW_FIELDS, state_row
from .params import ModelParams, derive_params
from .state import PhaseState, save_phase_state

SCHEMES = ("strang-split", "euler-maruyama")


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 0.05
    scheme: str = "strang-split"
    gamma_on: bool = True

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if self.scheme not in SCHEMES:
            raise ConfigError(
                f"scheme must be one of {SCHEMES}, got {self.scheme!r}"
            )


def noise_amplitude(params: ModelParams) -> float:
    """Shared-noise amplitude sqrt(2 nbar / N); fixed by the friction rate."""
    return math.sqrt(2.0 * params.nbar / params.n_atoms)


def force(state: PhaseState, params: ModelParams) -> np.ndarray:
    """Conservative drift 2 delta nbar Theta sin X_i (one shared Theta)."""
    theta = float(np.mean(np.cos(state.x)))
    return (2.0 * params.delta * params.nbar * theta) * np.sin(state.x)


def dissipative_drift(
    state: PhaseState, params: ModelParams, gamma_on: bool = True
) -> np.ndarray:
    """Friction -(gamma_tilde/N) sin X_i * sum_j sin X_j P_j, rank-1 in O(N)."""
    if not gamma_on:
        return np.zeros_like(state.p)
    d = derive_params(params)
    s = np.sin(state.x)
    coll = float(np.dot(s, state.p))
    return (-d.gamma_tilde / params.n_atoms * coll) * s


def energy(state: PhaseState, params: ModelParams) -> float:
    """Total energy in hbar*kappa units: eps sum P^2 + delta nbar N Theta^2."""
    theta = float(np.mean(np.cos(state.x)))
    kinetic = params.eps * float(np.sum(state.p * state.p))
    return kinetic + params.delta * params.nbar * params.n_atoms * theta * theta


def check_stability(state: PhaseState, params: ModelParams, cfg: IntegratorConfig):
    """Start-up heuristic: dt must resolve every rate in the problem."""
    d = derive_params(params)
    p_max = float(np.max(np.abs(state.p))) if state.p.size else 0.0
    # allow for momentum growth during relaxation
    rate_stream = 2.0 * params.eps * 5.0 * max(p_max, math.sqrt(d.sigma2_p))
    rate_osc = 2.0 * math.sqrt(params.eps * abs(params.delta) * params.nbar)
    fastest = max(rate_stream, rate_osc, d.gamma_tilde)
    if cfg.dt * fastest > 0.25:
        raise StabilityError(
            f"dt={cfg.dt} too large: fastest rate {fastest:.3g} "
            f"gives dt*rate={cfg.dt * fastest:.3g} > 0.25"
        )


def _kernel_args(params: ModelParams, cfg: IntegratorConfig):
    d = derive_params(params)
    force_coef = 2.0 * params.delta * params.nbar
    if cfg.gamma_on:
        g_over_n = d.gamma_tilde / params.n_atoms
        amp = noise_amplitude(params)
    else:
        g_over_n = 0.0
        amp = 0.0
    return force_coef, g_over_n, amp


def step(state: PhaseState, params: ModelParams, cfg: IntegratorConfig, backend) -> PhaseState:
    """Advance one time step; noise (if any) is drawn from `backend`."""
    out = state.copy()
    s = np.sin(out.x)
    c = np.cos(out.x)
    force_coef, g_over_n, amp = _kernel_args(params, cfg)
    bad = backend.advance_nbody(
        out.x, out.p, s, c, 1, cfg.dt, params.eps, force_coef,
        g_over_n, amp, cfg.scheme == "euler-maruyama",
    )
    if bad:
        raise TrajectoryDivergedError(f"non-finite state at tau={state.tau + cfg.dt}")
    out.tau = state.tau + cfg.dt
    return out


def run_trajectory(
    initial: PhaseState,
    params: ModelParams,
    cfg: IntegratorConfig,
    record_steps: np.ndarray,
    backend,
    checkpoint_path=None,
) -> tuple[np.ndarray, PhaseState]:
    """Integrate to the last record step, sampling observables on the way.

    record_steps must be increasing and start at 0 (the initial state is
    always recorded). Returns (rows, final_state) where rows has shape
    (len(record_steps), len(RAW_FIELDS)). Raises TrajectoryDivergedError,
    tagged with the failing time, if the state goes non-finite.
    """
    record_steps = np.asarray(record_steps, dtype=np.int64)
    if record_steps.size < 1 or record_steps[0] != 0:
        raise ConfigError("record_steps must start at step 0")
    if np.any(np.diff(record_steps) <= 0):
        raise ConfigError("record_steps must be strictly increasing")
    check_stability(initial, params, cfg)

    x = initial.x.copy()
    p = initial.p.copy()
    s = np.sin(x)
    c = np.cos(x)
    force_coef, g_over_n, amp = _kernel_args(params, cfg)
    em = cfg.scheme == "euler-maruyama"

    rows = np.empty((record_steps.size, len(RAW_FIELDS)))
    rows[0] = state_row(x, p)
    done = 0
    for j in range(1, record_steps.size):
        n_steps = int(record_steps[j] - done)
        bad = backend.advance_nbody(
            x, p, s, c, n_steps, cfg.dt, params.eps, force_coef,
            g_over_n, amp, em,
        )
        if bad:
            tau_fail = initial.tau + (done + bad) * cfg.dt
            raise TrajectoryDivergedError(f"non-finite state at tau={tau_fail:.6g}")
        done = int(record_steps[j])
        rows[j] = state_row(x, p)
        if checkpoint_path is not None:
            save_phase_state(
                PhaseState(x, p, initial.tau + done * cfg.dt), checkpoint_path
            )
    return rows, PhaseState(x, p, initial.tau + done * cfg.dt)
