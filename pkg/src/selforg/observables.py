"""Single-time observables, ensemble statistics, and series persistence.

A trajectory reports one raw row per recording time; rows from independent
trajectories are merged here into an EnsembleSeries. Standard errors come
from the spread across trajectories only. Moment ratios (kurtosis, phi11)
are by default computed from moments pooled over particles and trajectories
before taking the ratio; per-trajectory ratios averaged afterwards are
available as a sensitivity check.

Kinetic energy per particle in units of hbar*omega_r equals <P^2> in the
dimensionless variables, so the `kinetic` column is the pooled <P^2>.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__ as _code_version
from .errors import ConfigError, NeverCrossesError, NotStationaryError
from .params import ModelParams

CSV_HEADER = (
    "tau,theta_mean,theta_se,abs_theta_mean,abs_theta_se,"
    "theta_sq_mean,theta_sq_se,kinetic_mean,kinetic_se,"
    "kurtosis,phi11,rel_loc,photons"
)
SCHEMA_VERSION = 1

# Raw per-trajectory observables recorded at each time; theta is signed,
# the rest are per-particle means over the trajectory's state.
RAW_FIELDS = ("theta", "p2", "p4", "abs_p", "abs_sin", "abs_sin_p")


def order_parameter(state) -> tuple[float, float, float]:
    """(Theta, |Theta|, Theta^2) with Theta = mean cos X."""
    theta = float(np.mean(np.cos(state.x)))
    return theta, abs(theta), theta * theta


def kurtosis(p2: float, p4: float) -> float:
    """<p^4> / <p^2>^2; equals 3 for a Gaussian, bounded below by 1."""
    if p2 <= 0.0:
        raise ConfigError(f"kurtosis needs <p^2> > 0, got {p2}")
    return p4 / (p2 * p2)


def phi11(abs_sin_p: float, abs_sin: float, abs_p: float) -> float:
    """Position-momentum correlation <|sinX p|> / (<|sinX|><|p|>) - 1.

    Vanishes when the phase-space distribution factorizes.
    """
    if abs_sin <= 0.0 or abs_p <= 0.0:
        raise ConfigError("phi11 denominators must be positive")
    return abs_sin_p / (abs_sin * abs_p) - 1.0


def relative_localization(theta_sq: float, abs_theta: float) -> float:
    """delta_Theta / <|Theta|> with delta_Theta = sqrt(<Theta^2> - <|Theta|>^2)."""
    if abs_theta <= 0.0:
        raise ConfigError("relative_localization needs <|Theta|> > 0")
    gap = theta_sq - abs_theta * abs_theta
    if gap < 0.0:
        if gap < -1e-12 * max(theta_sq, 1e-300):
            raise ConfigError(
                f"inconsistent estimators: <Theta^2>={theta_sq} < <|Theta|>^2"
            )
        gap = 0.0
    return math.sqrt(gap) / abs_theta


def photon_estimate(theta_sq: float, params: ModelParams) -> float:
    """Intracavity photon number N nbar <Theta^2>."""
    if theta_sq < 0.0:
        raise ConfigError(f"theta_sq must be >= 0, got {theta_sq}")
    return params.n_atoms * params.nbar * theta_sq


def state_row(x: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Raw observable row for one state, ordered as RAW_FIELDS."""
    s = np.sin(x)
    theta = float(np.mean(np.cos(x)))
    p2 = p * p
    return np.array(
        [
            theta,
            float(np.mean(p2)),
            float(np.mean(p2 * p2)),
            float(np.mean(np.abs(p))),
            float(np.mean(np.abs(s))),
            float(np.mean(np.abs(s * p))),
        ]
    )


def recording_grid(
    horizon: float, dt: float, per_decade: int = 48, tau_min: float = 1.0
) -> np.ndarray:
    """Step indices of the recording times: tau=0 plus a log grid up to horizon.

    Times are snapped to integer multiples of dt; duplicates collapse, so the
    effective density near tau_min is limited by dt.
    """
    if dt <= 0.0:
        raise ConfigError(f"dt must be > 0, got {dt}")
    if horizon < 0.0:
        raise ConfigError(f"horizon must be >= 0, got {horizon}")
    n_total = int(round(horizon / dt))
    if n_total == 0:
        return np.array([0], dtype=np.int64)
    tau_min = max(tau_min, dt)
    steps = {0, n_total}
    if horizon > tau_min:
        n_pts = max(2, int(round(per_decade * math.log10(horizon / tau_min))) + 1)
        for tau in np.geomspace(tau_min, horizon, n_pts):
            k = int(round(tau / dt))
            if 0 < k <= n_total:
                steps.add(k)
    else:
        k = int(round(tau_min / dt))
        if 0 < k <= n_total:
            steps.add(k)
    return np.array(sorted(steps), dtype=np.int64)


def _mean_se(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard error across axis 0 (trajectories)."""
    m = values.mean(axis=0)
    if values.shape[0] > 1:
        se = values.std(axis=0, ddof=1) / math.sqrt(values.shape[0])
    else:
        se = np.full_like(m, np.nan)
    return m, se


@dataclass
class EnsembleSeries:
    """Trajectory-averaged observables on a common recording grid."""

    taus: np.ndarray
    theta_mean: np.ndarray
    theta_se: np.ndarray
    abs_theta_mean: np.ndarray
    abs_theta_se: np.ndarray
    theta_sq_mean: np.ndarray
    theta_sq_se: np.ndarray
    kinetic_mean: np.ndarray
    kinetic_se: np.ndarray
    kurtosis: np.ndarray
    phi11: np.ndarray
    rel_loc: np.ndarray
    photons: np.ndarray
    engine: str
    dt: float
    seed: int
    trajectories: int
    pooling: str
    backend: str
    params_initial: ModelParams | None
    params_final: ModelParams | None
    n_aborted: int = 0
    # (T, R, len(RAW_FIELDS)) raw rows; kept in memory for jackknife and
    # divergence analysis, never serialized to CSV.
    raw: np.ndarray | None = field(default=None, repr=False)

    @property
    def horizon(self) -> float:
        return float(self.taus[-1])

    @classmethod
    def from_trajectories(
        cls,
        taus: np.ndarray,
        raw: np.ndarray,
        *,
        engine: str,
        dt: float,
        seed: int,
        pooling: str = "pooled",
        backend: str = "",
        params_initial: ModelParams | None = None,
        params_final: ModelParams | None = None,
        n_aborted: int = 0,
    ) -> "EnsembleSeries":
        if pooling not in ("pooled", "per-trajectory"):
            raise ConfigError(f"unknown pooling convention {pooling!r}")
        if raw.ndim != 3 or raw.shape[2] != len(RAW_FIELDS):
            raise ConfigError("raw must have shape (T, R, n_fields)")
        theta = raw[:, :, 0]
        p2 = raw[:, :, 1]
        p4 = raw[:, :, 2]
        abs_p = raw[:, :, 3]
        abs_sin = raw[:, :, 4]
        abs_sin_p = raw[:, :, 5]

        theta_m, theta_s = _mean_se(theta)
        abs_theta_m, abs_theta_s = _mean_se(np.abs(theta))
        theta_sq_m, theta_sq_s = _mean_se(theta * theta)
        kin_m, kin_s = _mean_se(p2)

        if pooling == "pooled":
            kurt = p4.mean(axis=0) / kin_m**2
            ph = abs_sin_p.mean(axis=0) / (
                abs_sin.mean(axis=0) * abs_p.mean(axis=0)
            ) - 1.0
        else:
            kurt = np.mean(p4 / p2**2, axis=0)
            ph = np.mean(abs_sin_p / (abs_sin * abs_p), axis=0) - 1.0

        gap = np.maximum(theta_sq_m - abs_theta_m**2, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.where(abs_theta_m > 0.0, np.sqrt(gap) / abs_theta_m, np.nan)
        if params_final is not None:
            photons = params_final.n_atoms * params_final.nbar * theta_sq_m
        else:
            photons = np.full_like(theta_sq_m, np.nan)

        return cls(
            taus=np.asarray(taus, dtype=float),
            theta_mean=theta_m,
            theta_se=theta_s,
            abs_theta_mean=abs_theta_m,
            abs_theta_se=abs_theta_s,
            theta_sq_mean=theta_sq_m,
            theta_sq_se=theta_sq_s,
            kinetic_mean=kin_m,
            kinetic_se=kin_s,
            kurtosis=kurt,
            phi11=ph,
            rel_loc=rel,
            photons=photons,
            engine=engine,
            dt=dt,
            seed=seed,
            trajectories=raw.shape[0],
            pooling=pooling,
            backend=backend,
            params_initial=params_initial,
            params_final=params_final,
            n_aborted=n_aborted,
            raw=raw,
        )

    # -- persistence ---------------------------------------------------

    def _columns(self) -> list[np.ndarray]:
        return [
            self.taus,
            self.theta_mean,
            self.theta_se,
            self.abs_theta_mean,
            self.abs_theta_se,
            self.theta_sq_mean,
            self.theta_sq_se,
            self.kinetic_mean,
            self.kinetic_se,
            self.kurtosis,
            self.phi11,
            self.rel_loc,
            self.photons,
        ]

    def to_csv(self, path) -> None:
        cols = self._columns()
        lines = [CSV_HEADER]
        for i in range(len(self.taus)):
            lines.append(",".join(repr(float(c[i])) for c in cols))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        self._write_sidecar(_sidecar_path(path))

    def _write_sidecar(self, path) -> None:
        def params_dict(p):
            if p is None:
                return None
            return {
                "delta": p.delta,
                "eps": p.eps,
                "nbar": p.nbar,
                "n_atoms": p.n_atoms,
            }

        meta = {
            "schema_version": SCHEMA_VERSION,
            "kind": "ensemble-series",
            "engine": self.engine,
            "dt": self.dt,
            "seed": self.seed,
            "trajectories": self.trajectories,
            "n_aborted": self.n_aborted,
            "pooling": self.pooling,
            "backend": self.backend,
            "horizon": self.horizon,
            "params_initial": params_dict(self.params_initial),
            "params_final": params_dict(self.params_final),
            "columns": CSV_HEADER.split(","),
            "code_version": _code_version,
        }
        with open(path, "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_csv(cls, path) -> "EnsembleSeries":
        side = _sidecar_path(path)
        try:
            with open(side) as fh:
                meta = json.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"missing sidecar {side}") from exc
        if meta.get("schema_version") != SCHEMA_VERSION:
            raise ConfigError(
                f"schema version mismatch: {meta.get('schema_version')} != {SCHEMA_VERSION}"
            )
        with open(path) as fh:
            header = fh.readline().strip()
            if header != CSV_HEADER:
                raise ConfigError(f"unexpected CSV header in {path}")
            data = np.array(
                [[float(v) for v in line.split(",")] for line in fh if line.strip()]
            )
        if data.ndim != 2 or data.shape[1] != len(CSV_HEADER.split(",")):
            raise ConfigError(f"malformed CSV body in {path}")

        def params_from(d):
            return None if d is None else ModelParams(**d)

        return cls(
            taus=data[:, 0],
            theta_mean=data[:, 1],
            theta_se=data[:, 2],
            abs_theta_mean=data[:, 3],
            abs_theta_se=data[:, 4],
            theta_sq_mean=data[:, 5],
            theta_sq_se=data[:, 6],
            kinetic_mean=data[:, 7],
            kinetic_se=data[:, 8],
            kurtosis=data[:, 9],
            phi11=data[:, 10],
            rel_loc=data[:, 11],
            photons=data[:, 12],
            engine=meta["engine"],
            dt=meta["dt"],
            seed=meta["seed"],
            trajectories=meta["trajectories"],
            pooling=meta["pooling"],
            backend=meta.get("backend", ""),
            params_initial=params_from(meta["params_initial"]),
            params_final=params_from(meta["params_final"]),
            n_aborted=meta.get("n_aborted", 0),
        )


def _sidecar_path(path):
    path = str(path)
    return (path[:-4] if path.endswith(".csv") else path) + ".json"


@dataclass(frozen=True)
class TStarResult:
    t_star: float
    t_star_err: float | None
    stationary: float
    fraction: float


def _unpack_series(series) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    if hasattr(series, "taus"):
        theta_traj = None
        if getattr(series, "raw", None) is not None:
            theta_traj = series.raw[:, :, 0]
        return np.asarray(series.taus, float), np.asarray(
            series.theta_sq_mean, float
        ), theta_traj
    taus, ts = series
    return np.asarray(taus, float), np.asarray(ts, float), None


def _stationary_and_crossing(
    taus: np.ndarray, ts: np.ndarray, fraction: float
) -> tuple[float, float]:
    tail = taus >= taus[-1] / 10.0
    stationary = float(ts[tail].mean())
    level = fraction * stationary
    if ts[0] >= level:
        return stationary, float(taus[0])
    above = np.flatnonzero(ts >= level)
    if above.size == 0:
        raise NeverCrossesError(
            f"series never reaches {fraction:.0%} of its stationary value"
        )
    k = int(above[0])
    # log-linear interpolation between the bracketing records
    t0, t1 = taus[k - 1], taus[k]
    v0, v1 = ts[k - 1], ts[k]
    if t0 <= 0.0 or v1 == v0:
        return stationary, float(t1)
    frac = (level - v0) / (v1 - v0)
    return stationary, float(
        math.exp(math.log(t0) + frac * (math.log(t1) - math.log(t0)))
    )


def t_star(series, fraction: float = 0.6, flat_rtol: float = 0.05) -> TStarResult:
    """First time <Theta^2> reaches `fraction` of its stationary value.

    The stationary value is the mean of <Theta^2> over the trailing decade of
    log-time, which must first pass a flatness test: the two halves of the
    trailing decade may differ by at most max(3 standard errors, flat_rtol
    relative). The relative floor keeps the gate meaningful for large
    ensembles, whose standard errors shrink below any physically relevant
    residual drift. The crossing is interpolated log-linearly between
    records. Raises NotStationaryError or NeverCrossesError when either part
    fails.
    """
    taus, ts, theta_traj = _unpack_series(series)
    if taus.size < 4:
        raise ConfigError("t_star needs at least 4 records")
    if not 0.0 < fraction < 1.0:
        raise ConfigError(f"fraction must lie in (0, 1), got {fraction}")

    tail = np.flatnonzero(taus >= taus[-1] / 10.0)
    if tail.size < 4:
        raise NotStationaryError("trailing decade holds fewer than 4 records")
    half = tail[tail.size // 2]
    first, second = tail[tail < half], tail[tail >= half]
    scale = max(abs(float(ts[tail].mean())), 1e-300)

    if theta_traj is not None and theta_traj.shape[0] > 2:
        sq = theta_traj**2
        d = sq[:, second].mean(axis=1) - sq[:, first].mean(axis=1)
        se = d.std(ddof=1) / math.sqrt(d.size)
        if abs(d.mean()) > max(3.0 * se, flat_rtol * scale):
            raise NotStationaryError(
                f"trailing-decade drift {d.mean():.3e} exceeds "
                f"max(3 SE = {3 * se:.3e}, {flat_rtol:.0%} of {scale:.3e})"
            )
    else:
        m1, m2 = ts[first].mean(), ts[second].mean()
        spread = ts[tail].std(ddof=1) if tail.size > 1 else 0.0
        if abs(m2 - m1) > max(
            3.0 * spread / math.sqrt(tail.size / 2.0), flat_rtol * scale
        ):
            raise NotStationaryError(
                f"trailing-decade halves differ: {m1:.4e} vs {m2:.4e}"
            )

    stationary, crossing = _stationary_and_crossing(taus, ts, fraction)

    err = None
    if theta_traj is not None and theta_traj.shape[0] > 2:
        # Delete-one jackknife over trajectories.
        sq = theta_traj**2
        total = sq.sum(axis=0)
        n = sq.shape[0]
        estimates = []
        for j in range(n):
            loo = (total - sq[j]) / (n - 1)
            try:
                estimates.append(_stationary_and_crossing(taus, loo, fraction)[1])
            except NeverCrossesError:
                continue
        if len(estimates) == n:
            e = np.array(estimates)
            err = float(math.sqrt((n - 1) / n * ((e - e.mean()) ** 2).sum()))
    return TStarResult(crossing, err, stationary, fraction)
