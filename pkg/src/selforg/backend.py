"""Backend selection: JIT kernels by default, pure NumPy on request.

Set SELFORG_DISABLE_NUMBA=1 to force the NumPy path; it is also used
automatically when numba cannot be imported. Both backends expose the same
surface and consume identical random streams for a given seed, but they are
not bit-identical to each other (different summation orders); each is
individually deterministic.
"""

from __future__ import annotations

import math
import os
import warnings

import numpy as np

from . import _kernels_numpy as _knp

TWO_PI = 2.0 * math.pi

try:
    from . import _kernels_numba as _knb

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag instead
    _knb = None
    HAS_NUMBA = False


class NumpyBackend:
    name = "numpy"

    def __init__(self):
        self._rng = np.random.RandomState()

    def seed(self, seed: int) -> None:
        self._rng = np.random.RandomState(seed & 0xFFFFFFFF)

    def normals(self, n: int) -> np.ndarray:
        return self._rng.normal(size=n)

    def uniforms(self, n: int) -> np.ndarray:
        return self._rng.random_sample(size=n)

    def advance_nbody(self, x, p, s, c, n_steps, dt, eps, force_coef,
                      g_over_n, noise_amp, em=False) -> int:
        return _knp.advance_nbody(
            self._rng, x, p, s, c, n_steps, dt, eps, force_coef,
            g_over_n, noise_amp, em,
        )

    def advance_meanfield(self, x, p, s, c, n_steps, dt, eps, force_scale,
                          c1, cross, g_over_n, noise_amp) -> int:
        return _knp.advance_meanfield(
            self._rng, x, p, s, c, n_steps, dt, eps, force_scale,
            c1, cross, g_over_n, noise_amp,
        )

    def metropolis(self, x, n_sweeps, width, a_coef, theta_trace) -> int:
        return _knp.metropolis_sweeps(
            self._rng, x, n_sweeps, width, a_coef, theta_trace
        )


class NumbaBackend:
    name = "numba"

    def seed(self, seed: int) -> None:
        _knb.seed_rng(seed & 0xFFFFFFFF)

    def normals(self, n: int) -> np.ndarray:
        return _knb.draw_normals(n)

    def uniforms(self, n: int) -> np.ndarray:
        return _knb.draw_uniforms(n)

    def advance_nbody(self, x, p, s, c, n_steps, dt, eps, force_coef,
                      g_over_n, noise_amp, em=False) -> int:
        return _knb.advance_nbody(
            x, p, s, c, n_steps, dt, eps, force_coef, g_over_n, noise_amp, em
        )

    def advance_meanfield(self, x, p, s, c, n_steps, dt, eps, force_scale,
                          c1, cross, g_over_n, noise_amp) -> int:
        return _knb.advance_meanfield(
            x, p, s, c, n_steps, dt, eps, force_scale, c1, cross,
            g_over_n, noise_amp,
        )

    def metropolis(self, x, n_sweeps, width, a_coef, theta_trace) -> int:
        return _knb.metropolis_sweeps(x, n_sweeps, width, a_coef, theta_trace)


_instances: dict[str, object] = {}


def backend_name() -> str:
    if os.environ.get("SELFORG_DISABLE_NUMBA", "").strip() not in ("", "0"):
        return "numpy"
    if not HAS_NUMBA:
        warnings.warn("numba unavailable; falling back to the NumPy backend")
        return "numpy"
    return "numba"


def get_backend(name: str | None = None):
    """Return the kernel backend (fresh RNG state for numpy, shared for numba)."""
    name = name or backend_name()
    if name == "numpy":
        # Each caller gets its own RandomState so seeding is explicit.
        return NumpyBackend()
    if name == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("numba backend requested but numba is unavailable")
        if "numba" not in _instances:
            _instances["numba"] = NumbaBackend()
        return _instances["numba"]
    raise ValueError(f"unknown backend {name!r}")
