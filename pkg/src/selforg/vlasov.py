"""Linear stability of the homogeneous state against grating formation.

Above threshold (nbar_f > nbar_c) small density fluctuations grow
exponentially at a rate gamma_v (in units of kappa) that solves

    [1 - 2 gamma_v / (1 + delta^2)] * F(gamma_v) * (nbar_f / nbar_c) = 1,
    F(g) = 1 - sqrt(pi) * b * exp(b^2) * erfc(b),   b = g * sqrt(beta_tilde / (4 eps)).

The product exp(b^2) erfc(b) is evaluated in scaled form (erfcx) because
exp(b^2) alone overflows for b^2 > ~709 while the product stays O(1/b).
The root is found by bracketing and bisection; F is smooth but flat near
threshold, so robustness is preferred over iteration count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    NoExponentialStageError,
    PhysicsError,
    VlasovStableError,
)
from .params import ModelParams, derive_params

_SQRT_PI = math.sqrt(math.pi)

# Below this the plain product exp(x^2)*erfc(x) is exact to ~1e-13 and far
# from overflow (x^2 < 676); above it the Laplace continued fraction has
# converged to full double precision at the depth used.
_ERFCX_SPLIT = 26.0
_CF_DEPTH = 40


def erfcx(x: float) -> float:
    """Scaled complementary error function exp(x^2) erfc(x) for x >= 0."""
    if x < 0.0:
        raise ConfigError(f"erfcx requires x >= 0, got {x}")
    if x < _ERFCX_SPLIT:
        return math.exp(x * x) * math.erfc(x)
    # Laplace continued fraction, evaluated bottom-up:
    # sqrt(pi) erfcx(x) = 1 / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    t = 0.0
    for k in range(_CF_DEPTH, 0, -1):
        t = (0.5 * k) / (x + t)
    return 1.0 / (_SQRT_PI * (x + t))


def _f_factor(gamma_v: float, beta_tilde: float, eps: float) -> float:
    b = gamma_v * math.sqrt(beta_tilde / (4.0 * eps))
    return 1.0 - _SQRT_PI * b * erfcx(b)


def dispersion_lhs(gamma_v: float, ratio: float, params: ModelParams) -> float:
    """Left-hand side of the growth-rate equation; the root sits at lhs = 1."""
    if gamma_v < 0.0:
        raise ConfigError(f"gamma_v must be >= 0, got {gamma_v}")
    d = derive_params(params)
    bracket = 1.0 - 2.0 * gamma_v / (1.0 + params.delta * params.delta)
    return bracket * _f_factor(gamma_v, d.beta_tilde, params.eps) * ratio


@dataclass(frozen=True)
class GrowthRateResult:
    gamma_v: float
    residual: float
    bracket: tuple[float, float]
    iterations: int


def growth_rate(ratio: float, params: ModelParams) -> GrowthRateResult:
    """Positive root of the dispersion relation for nbar_f / nbar_c = ratio.

    Raises VlasovStableError for ratio <= 1 (no positive root; the
    homogeneous state is stable). The returned root satisfies
    |lhs - 1| < 1e-10.
    """
    if ratio <= 1.0:
        raise VlasovStableError(
            f"nbar_f/nbar_c = {ratio} <= 1: homogeneous state is stable"
        )

    def g(x):
        return dispersion_lhs(x, ratio, params) - 1.0

    lo, hi = 0.0, 1e-3
    while g(hi) > 0.0:
        lo = hi
        hi *= 2.0
        if hi > 1e9:
            raise PhysicsError("growth_rate: no sign change found")
    iterations = 0
    while hi - lo > 1e-15 * max(1.0, hi) and iterations < 200:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    root = 0.5 * (lo + hi)
    residual = abs(g(root))
    if residual >= 1e-10:
        raise PhysicsError(
            f"growth_rate: residual {residual:.3e} at root {root:.6e}"
        )
    return GrowthRateResult(root, residual, (lo, hi), iterations)


@dataclass(frozen=True)
class StageOneFit:
    rate: float
    rate_err: float
    window: tuple[float, float]
    n_points: int
    stationary: float


def fit_stage_one(series, stationary: float | None = None) -> StageOneFit:
    """Exponential rate of the initial potential-depth growth.

    Least-squares fit of log <Theta^2> against tau over the window where
    <Theta^2> has grown past 3x its initial value but is still below 30% of
    its stationary value, additionally capped at 12x the initial value: the
    growth decelerates once particles start to get trapped by the forming
    grating, so the fit must stay within the first decade of amplification
    above the finite-N seed to measure the linear-instability rate. <Theta^2>
    grows at twice the amplitude rate, so the returned rate is half the
    fitted slope.

    `series` is either an EnsembleSeries or a (taus, theta_sq) pair.
    """
    if hasattr(series, "taus"):
        taus = np.asarray(series.taus, dtype=float)
        ts = np.asarray(series.theta_sq_mean, dtype=float)
    else:
        taus, ts = (np.asarray(a, dtype=float) for a in series)
    if taus.shape != ts.shape or taus.size < 3:
        raise ConfigError("fit_stage_one needs matching taus/theta_sq arrays")

    w0 = ts[0]
    if stationary is None:
        # Trailing-decade mean as the plateau estimate.
        tail = taus >= taus[-1] / 10.0
        stationary = float(ts[tail].mean())
    lo, hi = 3.0 * w0, min(0.3 * stationary, 12.0 * w0)
    mask = (ts >= lo) & (ts <= hi) & (taus > 0.0)
    # Clip to the first contiguous run so a late re-entry cannot pollute the fit.
    idx = np.flatnonzero(mask)
    if idx.size >= 2:
        breaks = np.flatnonzero(np.diff(idx) > 1)
        if breaks.size:
            idx = idx[: breaks[0] + 1]
    if idx.size < 3:
        raise NoExponentialStageError(
            f"no exponential stage detected (window [{lo:.3e}, {hi:.3e}] "
            f"holds {idx.size} points)"
        )
    x = taus[idx]
    y = np.log(ts[idx])
    (slope, intercept), cov = np.polyfit(x, y, 1, cov=True)
    if slope <= 0.0:
        raise NoExponentialStageError("no exponential stage detected (non-growing)")
    return StageOneFit(
        rate=0.5 * slope,
        rate_err=0.5 * math.sqrt(max(cov[0, 0], 0.0)),
        window=(float(x[0]), float(x[-1])),
        n_points=int(idx.size),
        stationary=float(stationary),
    )
