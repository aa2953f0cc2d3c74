"""TOML run configuration with a closed key set.

Exactly these keys are understood (delta_f only for path-B):

    delta, eps, nbar_i, nbar_f, n_atoms, horizon, dt, trajectories,
    seed, engine, protocol, delta_f

Anything else is an error, as is a missing required key. CLI flags mirror
the keys and override file values.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .harness import ENGINES, PROTOCOL_KINDS, QuenchProtocol
from .params import ModelParams, path_b_convert

_NUMERIC = {"delta", "eps", "nbar_i", "nbar_f", "horizon", "dt", "delta_f"}
_INTEGRAL = {"n_atoms", "trajectories", "seed"}
_STRINGS = {"engine": ENGINES, "protocol": PROTOCOL_KINDS}
KNOWN_KEYS = _NUMERIC | _INTEGRAL | set(_STRINGS)
REQUIRED_KEYS = KNOWN_KEYS - {"nbar_f", "delta_f"}


def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return validate_config(raw, source=str(path))


def validate_config(raw: dict, source: str = "config") -> dict:
    unknown = set(raw) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"{source}: unknown keys {sorted(unknown)}")
    missing = REQUIRED_KEYS - set(raw)
    if missing:
        raise ConfigError(f"{source}: missing keys {sorted(missing)}")
    cfg = {}
    for key, value in raw.items():
        if key in _NUMERIC:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"{source}: {key} must be a number, got {value!r}")
            cfg[key] = float(value)
        elif key in _INTEGRAL:
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{source}: {key} must be an integer, got {value!r}")
            cfg[key] = value
        else:
            allowed = _STRINGS[key]
            if value not in allowed:
                raise ConfigError(
                    f"{source}: {key} must be one of {allowed}, got {value!r}"
                )
            cfg[key] = value
    return cfg


def protocol_from_config(cfg: dict, **protocol_kwargs) -> QuenchProtocol:
    """Build the QuenchProtocol described by a validated config mapping."""
    kind = cfg["protocol"]
    initial = ModelParams(cfg["delta"], cfg["eps"], cfg["nbar_i"], cfg["n_atoms"])

    if kind == "path-A":
        if "delta_f" in cfg and cfg["delta_f"] != cfg["delta"]:
            raise ConfigError("path-A keeps the detuning fixed; drop delta_f")
        if "nbar_f" not in cfg:
            raise ConfigError("path-A needs nbar_f")
        final = initial.with_nbar(cfg["nbar_f"])
    elif kind == "path-B":
        if "delta_f" not in cfg:
            raise ConfigError("path-B needs delta_f")
        nbar_f = path_b_convert(cfg["delta"], cfg["nbar_i"], cfg["delta_f"])
        if "nbar_f" in cfg and abs(cfg["nbar_f"] - nbar_f) > 1e-9 * max(nbar_f, 1.0):
            raise ConfigError(
                f"path-B nbar_f must follow the fixed-amplitude conversion "
                f"({nbar_f!r}); drop it or fix it"
            )
        final = ModelParams(cfg["delta_f"], cfg["eps"], nbar_f, cfg["n_atoms"])
    else:  # none
        for key in ("nbar_f", "delta_f"):
            if key in cfg and cfg[key] != {"nbar_f": cfg["nbar_i"], "delta_f": cfg["delta"]}[key]:
                raise ConfigError(f"null protocol cannot change {key}")
        final = initial

    return QuenchProtocol(
        kind=kind,
        initial=initial,
        final=final,
        engine=cfg["engine"],
        horizon=cfg["horizon"],
        dt=cfg["dt"],
        trajectories=cfg["trajectories"],
        seed=cfg["seed"],
        **protocol_kwargs,
    )
