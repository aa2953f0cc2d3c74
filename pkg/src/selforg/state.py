"""Phase-space state of one trajectory plus binary checkpointing."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

TWO_PI = 2.0 * math.pi


@dataclass
class PhaseState:
    """Positions X in [0, 2pi), momenta P (hbar k units), time tau (1/kappa)."""

    x: np.ndarray
    p: np.ndarray
    tau: float = 0.0

    def __post_init__(self):
        self.x = np.mod(np.asarray(self.x, dtype=np.float64), TWO_PI)
        self.p = np.asarray(self.p, dtype=np.float64).copy()
        if self.x.ndim != 1 or self.x.shape != self.p.shape or self.x.size < 1:
            raise ConfigError("x and p must be 1-d arrays of equal positive length")
        self.tau = float(self.tau)

    @property
    def n(self) -> int:
        return self.x.size

    def copy(self) -> "PhaseState":
        return PhaseState(self.x.copy(), self.p.copy(), self.tau)


# Checkpoint layout, little-endian: int64 N, float64 tau, N doubles X, N doubles P.
_HEAD = struct.Struct("<qd")


def save_phase_state(state: PhaseState, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_HEAD.pack(state.n, state.tau))
        fh.write(state.x.astype("<f8").tobytes())
        fh.write(state.p.astype("<f8").tobytes())


def load_phase_state(path) -> PhaseState:
    with open(path, "rb") as fh:
        head = fh.read(_HEAD.size)
        if len(head) != _HEAD.size:
            raise ConfigError(f"truncated checkpoint {path}")
        n, tau = _HEAD.unpack(head)
        if n < 1:
            raise ConfigError(f"corrupt checkpoint {path}: N={n}")
        body = fh.read(16 * n)
        if len(body) != 16 * n:
            raise ConfigError(f"truncated checkpoint {path}")
    arr = np.frombuffer(body, dtype="<f8")
    return PhaseState(arr[:n].copy(), arr[n:].copy(), tau)
