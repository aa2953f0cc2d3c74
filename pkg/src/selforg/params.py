"""Dimensionless model parameters and their closed-form derived quantities.

Everything downstream works in dimensionless units: positions X = k x wrapped
to [0, 2pi), momenta P = p / (hbar k), time tau = kappa t. The single-particle
kinetic energy in units of hbar*omega_r is then simply <P^2>. The four knobs
are the detuning ratio delta = Delta_c / kappa (negative for cooling), the
recoil ratio eps = omega_r / kappa (< 1 for the semiclassical description to
hold), the pump parameter nbar = N S^2 / (kappa^2 + Delta_c^2), and the atom
number N. Under Kac scaling nbar is held fixed as N grows.

Derived quantities:

    beta_tilde  = hbar * kappa * beta = -4 delta / (1 + delta^2)
    nbar_c      = (1 + delta^2) / (4 delta^2)        (ordering threshold)
    sigma2_p    = 1 / (2 eps beta_tilde)             (thermal <P^2>)
    gamma_tilde = 2 nbar eps beta_tilde              (collective friction / kappa)

These satisfy the fluctuation-dissipation identity nbar / gamma_tilde =
sigma2_p, which the stochastic engines rely on: the shared-noise amplitude
sqrt(2 nbar / N) is fixed by gamma_tilde and must not be tuned independently.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError


@dataclass(frozen=True)
class ModelParams:
    """Physical knobs of one parameter point.

    delta must be strictly negative (red detuning, cooling fixed point);
    eps must lie in (0, 1); nbar >= 0; n_atoms >= 1.
    """

    delta: float
    eps: float
    nbar: float
    n_atoms: int

    def __post_init__(self):
        if not self.delta < 0.0:
            raise ConfigError(
                f"delta must be < 0 (red detuning), got {self.delta}"
            )
        if not self.eps > 0.0:
            raise ConfigError(f"eps must be > 0, got {self.eps}")
        if not self.eps < 1.0:
            raise ConfigError(
                f"eps must be < 1 (linewidth above recoil), got {self.eps}"
            )
        if self.nbar < 0.0:
            raise ConfigError(f"nbar must be >= 0, got {self.nbar}")
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise ConfigError(
                f"n_atoms must be a positive integer, got {self.n_atoms}"
            )
        object.__setattr__(self, "n_atoms", int(self.n_atoms))

    def with_nbar(self, nbar: float) -> "ModelParams":
        return ModelParams(self.delta, self.eps, nbar, self.n_atoms)


@dataclass(frozen=True)
class DerivedParams:
    beta_tilde: float
    nbar_c: float
    sigma2_p: float
    gamma_tilde: float


def derive_params(p: ModelParams) -> DerivedParams:
    """Evaluate the closed forms above. Pure and deterministic."""
    beta_tilde = -4.0 * p.delta / (1.0 + p.delta * p.delta)
    nbar_c = (1.0 + p.delta * p.delta) / (4.0 * p.delta * p.delta)
    sigma2_p = 1.0 / (2.0 * p.eps * beta_tilde)
    gamma_tilde = 2.0 * p.nbar * p.eps * beta_tilde
    return DerivedParams(beta_tilde, nbar_c, sigma2_p, gamma_tilde)


def threshold_curve(delta_grid) -> list[tuple[float, float]]:
    """Ordering threshold nbar_c over a grid of detunings.

    Reproduces the phase boundary between the homogeneous and the
    spatially organized phase in the (delta, nbar) plane.
    """
    out = []
    for d in delta_grid:
        if not d < 0.0:
            raise ConfigError(f"threshold_curve needs delta < 0, got {d}")
        out.append((float(d), (1.0 + d * d) / (4.0 * d * d)))
    return out


def path_b_convert(delta_i: float, nbar_i: float, delta_f: float) -> float:
    """Pump parameter after a detuning quench at fixed laser amplitude.

    N S^2 stays constant, so nbar scales with 1 / (1 + delta^2):
    nbar_f = nbar_i (1 + delta_i^2) / (1 + delta_f^2).
    """
    if not (delta_i < 0.0 and delta_f < 0.0):
        raise ConfigError(
            f"detunings must be < 0, got delta_i={delta_i}, delta_f={delta_f}"
        )
    if nbar_i < 0.0:
        raise ConfigError(f"nbar_i must be >= 0, got {nbar_i}")
    return nbar_i * (1.0 + delta_i * delta_i) / (1.0 + delta_f * delta_f)
