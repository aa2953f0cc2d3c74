"""Quench protocols, trajectory ensembles, engine comparisons, N-scaling.

A trajectory is the unit of work: each one gets its own RNG stream derived
from the master seed by counter-based spawning, is sampled from the
pre-quench equilibrium, and is evolved at the post-quench parameters by the
requested engine. Workers are stateless between trajectories and the merge
runs in trajectory order, so results are byte-identical for any worker
count. SELFORG_MAX_WORKERS caps the pool.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
import multiprocessing

import numpy as np

from .backend import backend_name, get_backend
from .errors import ConfigError, PhysicsError, TrajectoryDivergedError
from .meanfield import build_mf_ensemble, run_mf_trajectory
from .nbody import IntegratorConfig, run_trajectory
from .observables import EnsembleSeries, RAW_FIELDS, recording_grid, t_star
from .params import ModelParams, path_b_convert
from .sampler import sample_equilibrium

ENGINES = ("full", "hamiltonian", "meanfield")
PROTOCOL_KINDS = ("path-A", "path-B", "none")

PER_TRAJ_HEADER = "tau,theta,theta_sq,kinetic,p2,p4,abs_sin,abs_p,abs_sin_p"


@dataclass(frozen=True)
class QuenchProtocol:
    """One quench experiment: equilibrate at `initial`, evolve at `final`."""

    kind: str
    initial: ModelParams
    final: ModelParams
    engine: str
    horizon: float
    dt: float = 0.05
    trajectories: int = 24
    seed: int = 2024
    scheme: str = "strang-split"
    per_decade: int = 48
    tau_min: float = 1.0
    mf_samples: int = 10_000
    burn_sweeps: int | None = None
    pooling: str = "pooled"

    def __post_init__(self):
        if self.kind not in PROTOCOL_KINDS:
            raise ConfigError(f"protocol must be one of {PROTOCOL_KINDS}")
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}")
        if self.horizon < 0 or self.trajectories < 1:
            raise ConfigError("horizon must be >= 0 and trajectories >= 1")
        if self.initial.eps != self.final.eps:
            raise ConfigError("recoil ratio eps cannot change in a quench")
        if self.initial.n_atoms != self.final.n_atoms:
            raise ConfigError("atom number cannot change in a quench")
        if self.kind == "path-A":
            if self.initial.delta != self.final.delta:
                raise ConfigError("path-A keeps the detuning fixed")
        elif self.kind == "path-B":
            want = path_b_convert(
                self.initial.delta, self.initial.nbar, self.final.delta
            )
            if not math.isclose(self.final.nbar, want, rel_tol=1e-9, abs_tol=1e-15):
                raise ConfigError(
                    f"path-B pump must follow the fixed-amplitude conversion: "
                    f"expected nbar_f={want!r}, got {self.final.nbar!r}"
                )
        else:  # none
            if self.initial != self.final:
                raise ConfigError("a null quench needs final == initial")


def trajectory_seeds(master: int, count: int) -> list[int]:
    ss = np.random.SeedSequence(master)
    return [int(child.generate_state(1)[0]) for child in ss.spawn(count)]


def _run_one(args):
    protocol, index, seed, want_initial, bname = args
    backend = get_backend(bname)
    backend.seed(seed)
    steps = recording_grid(
        protocol.horizon, protocol.dt, protocol.per_decade, protocol.tau_min
    )
    cfg = IntegratorConfig(
        dt=protocol.dt,
        scheme=protocol.scheme,
        gamma_on=protocol.engine != "hamiltonian",
    )
    try:
        init = sample_equilibrium(
            protocol.initial, backend, burn_sweeps=protocol.burn_sweeps
        )
        if protocol.engine == "meanfield":
            ens = build_mf_ensemble(
                init.x, protocol.initial, backend, samples=protocol.mf_samples
            )
            rows, _ = run_mf_trajectory(ens, protocol.final, cfg, steps, backend)
            x0, p0 = ens.x, ens.p
        else:
            rows, _ = run_trajectory(init, protocol.final, cfg, steps, backend)
            x0, p0 = init.x, init.p
    except TrajectoryDivergedError as exc:
        return index, None, str(exc), None
    initial_dump = (x0.copy(), p0.copy()) if want_initial else None
    return index, rows, None, initial_dump


def _resolve_workers(requested: int | None, n_tasks: int) -> int:
    if requested is None:
        cap = os.environ.get("SELFORG_MAX_WORKERS", "").strip()
        requested = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(requested, n_tasks))


def run_quench(
    protocol: QuenchProtocol,
    workers: int | None = None,
    dump_initial=None,
    per_traj_dir=None,
    backend: str | None = None,
) -> EnsembleSeries:
    """Run the trajectory ensemble and merge it into an EnsembleSeries.

    Fails if more than 1% of trajectories abort on non-finite states;
    isolated aborts are dropped from the statistics and counted in the
    series metadata.
    """
    bname = backend or backend_name()
    seeds = trajectory_seeds(protocol.seed, protocol.trajectories)
    want_initial = dump_initial is not None
    tasks = [
        (protocol, k, seeds[k], want_initial, bname)
        for k in range(protocol.trajectories)
    ]
    n_workers = _resolve_workers(workers, len(tasks))

    if n_workers == 1:
        results = [_run_one(t) for t in tasks]
    else:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=n_workers, mp_context=ctx) as pool:
            results = list(pool.map(_run_one, tasks, chunksize=1))

    results.sort(key=lambda r: r[0])
    aborts = [(k, msg) for k, rows, msg, _ in results if rows is None]
    if len(aborts) > 0.01 * protocol.trajectories:
        detail = "; ".join(f"trajectory {k}: {m}" for k, m in aborts[:5])
        raise PhysicsError(
            f"{len(aborts)}/{protocol.trajectories} trajectories aborted: {detail}"
        )

    kept = [r for r in results if r[1] is not None]
    raw = np.stack([r[1] for r in kept])
    steps = recording_grid(
        protocol.horizon, protocol.dt, protocol.per_decade, protocol.tau_min
    )
    taus = steps * protocol.dt

    if want_initial:
        _dump_initial_states(dump_initial, kept)
    if per_traj_dir is not None:
        _dump_per_trajectory(per_traj_dir, taus, kept)

    return EnsembleSeries.from_trajectories(
        taus,
        raw,
        engine=protocol.engine,
        dt=protocol.dt,
        seed=protocol.seed,
        pooling=protocol.pooling,
        backend=bname,
        params_initial=protocol.initial,
        params_final=protocol.final,
        n_aborted=len(aborts),
    )


def _dump_initial_states(path, results) -> None:
    lines = ["trajectory,particle,X,P"]
    for k, _, _, dump in results:
        x0, p0 = dump
        for i in range(x0.size):
            lines.append(f"{k},{i},{x0[i]!r},{p0[i]!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _dump_per_trajectory(dirpath, taus, results) -> None:
    os.makedirs(dirpath, exist_ok=True)
    for k, rows, _, _ in results:
        lines = [PER_TRAJ_HEADER]
        for j in range(len(taus)):
            theta, p2, p4, abs_p, abs_sin, abs_sin_p = rows[j]
            vals = (taus[j], theta, theta * theta, p2, p2, p4, abs_sin, abs_p, abs_sin_p)
            lines.append(",".join(repr(float(v)) for v in vals))
        with open(os.path.join(dirpath, f"trajectory_{k:04d}.csv"), "w") as fh:
            fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class EngineComparison:
    series: dict
    divergence_tau: dict

    def aligned_csv(self, path) -> None:
        engines = list(self.series)
        first = self.series[engines[0]]
        cols = ["tau"] + [
            f"{field}_{e}"
            for e in engines
            for field in ("abs_theta_mean", "abs_theta_se", "kurtosis", "phi11")
        ]
        lines = [",".join(cols)]
        for i in range(len(first.taus)):
            vals = [first.taus[i]]
            for e in engines:
                s = self.series[e]
                vals += [s.abs_theta_mean[i], s.abs_theta_se[i], s.kurtosis[i], s.phi11[i]]
            lines.append(",".join(repr(float(v)) for v in vals))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def first_divergence_tau(a: EnsembleSeries, b: EnsembleSeries) -> float | None:
    """First recording time where <|Theta|> differs beyond combined 3 sigma."""
    if not np.array_equal(a.taus, b.taus):
        raise ConfigError("series are not on a common recording grid")
    gap = np.abs(a.abs_theta_mean - b.abs_theta_mean)
    tol = 3.0 * np.sqrt(a.abs_theta_se**2 + b.abs_theta_se**2)
    beyond = np.flatnonzero(gap > tol)
    return float(a.taus[beyond[0]]) if beyond.size else None


def compare_engines(
    protocol: QuenchProtocol,
    engines=("full", "hamiltonian", "meanfield"),
    workers: int | None = None,
    backend: str | None = None,
) -> EngineComparison:
    """Run the same protocol under several engines on one recording grid.

    All engines share the master seed, hence identical pre-quench initial
    ensembles for the N-body engines.
    """
    series = {}
    for engine in engines:
        if engine not in ENGINES:
            raise ConfigError(f"unknown engine {engine!r}")
        series[engine] = run_quench(
            replace(protocol, engine=engine), workers=workers, backend=backend
        )
    div = {}
    names = list(engines)
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            div[(names[i], names[j])] = first_divergence_tau(
                series[names[i]], series[names[j]]
            )
    return EngineComparison(series, div)


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    slope_err: float
    intercept: float
    intercept_err: float


@dataclass(frozen=True)
class ScalingResult:
    rows: list
    fits: dict

    def table_csv(self, path) -> None:
        lines = ["engine,n_atoms,t_star,t_star_err"]
        for engine, n, ts, err in self.rows:
            lines.append(f"{engine},{n},{ts!r},{(err if err is not None else float('nan'))!r}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    def slope_difference(self, a: str, b: str) -> tuple[float, float]:
        fa, fb = self.fits[a], self.fits[b]
        return fa.slope - fb.slope, math.hypot(fa.slope_err, fb.slope_err)


def fit_scaling(rows) -> dict:
    """Weighted log-log fit ln t* = intercept + slope ln N, per engine."""
    by_engine: dict[str, list] = {}
    for engine, n, ts, err in rows:
        by_engine.setdefault(engine, []).append((n, ts, err))
    fits = {}
    for engine, pts in by_engine.items():
        if len(pts) < 2:
            raise ConfigError(
                f"engine {engine!r} has {len(pts)} size points; need >= 2 for a slope"
            )
        n = np.array([p[0] for p in pts], dtype=float)
        ts = np.array([p[1] for p in pts], dtype=float)
        errs = np.array(
            [p[2] if p[2] is not None and p[2] > 0 else np.nan for p in pts]
        )
        x = np.log(n)
        y = np.log(ts)
        if np.all(np.isfinite(errs)):
            w = ts / errs  # weight 1/sigma_lnt
        else:
            w = np.ones_like(y)
        coeffs, cov = np.polyfit(x, y, 1, w=w, cov="unscaled")
        fits[engine] = ScalingFit(
            slope=float(coeffs[0]),
            slope_err=float(math.sqrt(max(cov[0, 0], 0.0))),
            intercept=float(coeffs[1]),
            intercept_err=float(math.sqrt(max(cov[1, 1], 0.0))),
        )
    return fits


def scaling_sweep(
    template: QuenchProtocol,
    n_list,
    engines=("full", "meanfield"),
    horizons: dict | None = None,
    workers: int | None = None,
    backend: str | None = None,
    fraction: float = 0.6,
) -> ScalingResult:
    """t*(N) table and log-log fits for each engine.

    `horizons` optionally maps N to a per-size horizon (relaxation times grow
    with N); otherwise the template horizon is reused everywhere. Each (engine,
    N) combination runs with a deterministic sub-seed of the template seed.
    """
    n_list = list(n_list)
    if len(n_list) < 2:
        raise ConfigError("scaling sweep needs at least two atom numbers")
    rows = []
    for engine in engines:
        for idx, n in enumerate(n_list):
            seed = int(
                np.random.SeedSequence(
                    (template.seed, ENGINES.index(engine), int(n))
                ).generate_state(1)[0]
            )
            horizon = float(horizons[n]) if horizons else template.horizon
            proto = replace(
                template,
                initial=template.initial.with_nbar(template.initial.nbar),
                engine=engine,
                horizon=horizon,
                seed=seed,
            )
            proto = replace(
                proto,
                initial=ModelParams(
                    template.initial.delta, template.initial.eps,
                    template.initial.nbar, int(n),
                ),
                final=ModelParams(
                    template.final.delta, template.final.eps,
                    template.final.nbar, int(n),
                ),
            )
            series = run_quench(proto, workers=workers, backend=backend)
            result = t_star(series, fraction=fraction)
            rows.append((engine, int(n), result.t_star, result.t_star_err))
    return ScalingResult(rows, fit_scaling(rows))
