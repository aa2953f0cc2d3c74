"""Command line interface.

Subcommands: simulate, compare, sweep, threshold, vlasov-rate, analyze.
Exit codes: 0 success, 1 configuration or I/O problem, 2 physics problem
(for example a series that is not yet stationary). SELFORG_MAX_WORKERS
caps the trajectory pool; SELFORG_DISABLE_NUMBA=1 selects the NumPy
backend.
"""

from __future__ import annotations

import argparse
import json
import sys

from .configio import load_config, protocol_from_config, validate_config
from .errors import ConfigError, PhysicsError
from .harness import compare_engines, run_quench, scaling_sweep
from .observables import EnsembleSeries, t_star
from .params import ModelParams, threshold_curve
from .vlasov import fit_stage_one, growth_rate


def _add_config_flags(sp):
    sp.add_argument("--config", help="TOML run configuration")
    sp.add_argument("--delta", type=float)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--nbar-i", dest="nbar_i", type=float)
    sp.add_argument("--nbar-f", dest="nbar_f", type=float)
    sp.add_argument("--delta-f", dest="delta_f", type=float)
    sp.add_argument("--n-atoms", dest="n_atoms", type=int)
    sp.add_argument("--horizon", type=float)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--trajectories", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--engine", choices=["full", "hamiltonian", "meanfield"])
    sp.add_argument("--protocol", choices=["path-A", "path-B", "none"])
    sp.add_argument("--mf-samples", type=int, default=10_000)
    sp.add_argument("--per-decade", type=int, default=48)
    sp.add_argument("--burn-sweeps", type=int)
    sp.add_argument(
        "--pooling", choices=["pooled", "per-trajectory"], default="pooled"
    )
    sp.add_argument("--workers", type=int)


def _protocol_from_args(args):
    raw = dict(load_config(args.config)) if args.config else {}
    for key in (
        "delta", "eps", "nbar_i", "nbar_f", "delta_f", "n_atoms",
        "horizon", "dt", "trajectories", "seed", "engine", "protocol",
    ):
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    cfg = validate_config(raw, source="command line")
    return protocol_from_config(
        cfg,
        mf_samples=args.mf_samples,
        per_decade=args.per_decade,
        burn_sweeps=args.burn_sweeps,
        pooling=args.pooling,
    )


def _cmd_simulate(args) -> int:
    protocol = _protocol_from_args(args)
    series = run_quench(
        protocol,
        workers=args.workers,
        dump_initial=args.dump_initial,
        per_traj_dir=args.per_trajectory_dir,
    )
    series.to_csv(args.out)
    print(f"wrote {args.out} ({series.trajectories} trajectories, "
          f"{series.n_aborted} aborted)")
    return 0


def _cmd_compare(args) -> int:
    protocol = _protocol_from_args(args)
    engines = args.engines.split(",")
    cmp = compare_engines(protocol, engines=engines, workers=args.workers)
    for engine, series in cmp.series.items():
        series.to_csv(f"{args.out_prefix}_{engine}.csv")
    cmp.aligned_csv(f"{args.out_prefix}_aligned.csv")
    for pair, tau in cmp.divergence_tau.items():
        label = "never within horizon" if tau is None else f"tau = {tau:g}"
        print(f"divergence {pair[0]} vs {pair[1]}: {label}")
    return 0


def _cmd_sweep(args) -> int:
    protocol = _protocol_from_args(args)
    n_list = [int(v) for v in args.n_list.split(",")]
    horizons = None
    if args.horizon_scale == "linear":
        base_n = n_list[0]
        horizons = {n: protocol.horizon * n / base_n for n in n_list}
    result = scaling_sweep(
        protocol,
        n_list,
        engines=tuple(args.engines.split(",")),
        horizons=horizons,
        workers=args.workers,
    )
    result.table_csv(args.out)
    fits = {
        engine: {
            "slope": f.slope,
            "slope_err": f.slope_err,
            "intercept": f.intercept,
            "intercept_err": f.intercept_err,
        }
        for engine, f in result.fits.items()
    }
    with open(args.out_fits, "w") as fh:
        json.dump(fits, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for engine, f in result.fits.items():
        print(f"{engine}: slope = {f.slope:.3f} +/- {f.slope_err:.3f}")
    return 0


def _cmd_threshold(args) -> int:
    deltas = [float(v) for v in args.deltas.split(",")]
    lines = ["delta,nbar_c"]
    for d, nc in threshold_curve(deltas):
        lines.append(f"{d!r},{nc!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_vlasov_rate(args) -> int:
    params = ModelParams(args.delta, args.eps, 1.0, 2)
    if args.batch:
        with open(args.batch) as fh:
            ratios = [float(line) for line in fh if line.strip()]
        lines = ["ratio,gamma_v,residual"]
        for r in ratios:
            res = growth_rate(r, params)
            lines.append(f"{r!r},{res.gamma_v!r},{res.residual!r}")
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        res = growth_rate(args.ratio, params)
        print(f"gamma_v = {res.gamma_v!r}")
        print(f"residual = {res.residual:.3e}")
    return 0


def _cmd_analyze(args) -> int:
    series = EnsembleSeries.from_csv(args.csv)
    result = t_star(series, fraction=args.fraction)
    print(f"stationary <Theta^2> = {result.stationary!r}")
    err = "n/a" if result.t_star_err is None else repr(result.t_star_err)
    print(f"t_star({args.fraction:g}) = {result.t_star!r} +/- {err}")
    fit = fit_stage_one(series, stationary=result.stationary)
    print(
        f"stage-one rate = {fit.rate!r} +/- {fit.rate_err!r} "
        f"over tau in [{fit.window[0]:g}, {fit.window[1]:g}] ({fit.n_points} records)"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="selforg",
        description="Quench dynamics of cavity-coupled atoms: simulation and analysis",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="run one protocol, write CSV + JSON sidecar")
    _add_config_flags(sp)
    sp.add_argument("--out", required=True, help="output CSV path")
    sp.add_argument("--dump-initial", help="CSV audit dump of sampled initial states")
    sp.add_argument("--per-trajectory-dir", help="write raw per-trajectory series here")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("compare", help="same protocol under several engines")
    _add_config_flags(sp)
    sp.add_argument("--engines", default="full,hamiltonian,meanfield")
    sp.add_argument("--out-prefix", required=True)
    sp.set_defaults(func=_cmd_compare)

    sp = sub.add_parser("sweep", help="t* scaling over atom number")
    _add_config_flags(sp)
    sp.add_argument("--n-list", required=True, help="comma-separated atom numbers")
    sp.add_argument("--engines", default="full,meanfield")
    sp.add_argument("--horizon-scale", choices=["fixed", "linear"], default="linear")
    sp.add_argument("--out", required=True, help="t* table CSV")
    sp.add_argument("--out-fits", required=True, help="fit summary JSON")
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("threshold", help="phase-boundary table nbar_c(delta)")
    sp.add_argument("--deltas", required=True, help="comma-separated detunings")
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_threshold)

    sp = sub.add_parser("vlasov-rate", help="growth rate of the homogeneous state")
    sp.add_argument("--ratio", type=float, help="nbar_f / nbar_c")
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--batch", help="file with one ratio per line")
    sp.add_argument("--out", help="CSV output for batch mode")
    sp.set_defaults(func=_cmd_vlasov_rate)

    sp = sub.add_parser("analyze", help="t* and stage-one fit of an existing CSV")
    sp.add_argument("--csv", required=True)
    sp.add_argument("--fraction", type=float, default=0.6)
    sp.set_defaults(func=_cmd_analyze)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "vlasov-rate" and args.ratio is None and not args.batch:
        ap.error("vlasov-rate needs --ratio or --batch")
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PhysicsError as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
