"""Exception hierarchy.

ConfigError covers bad user input (parameters, files, CLI flags) and maps to
exit code 1; PhysicsError covers simulations that ran fine but whose output
does not support the requested analysis (exit code 2).
"""


class SelforgError(Exception):
    pass


class ConfigError(SelforgError):
    """Invalid parameters, configuration keys, or file contents."""


class StabilityError(ConfigError):
    """Time step too large for the fastest rate in the problem."""


class PhysicsError(SelforgError):
    """A well-posed run whose result blocks the requested analysis."""


class NotStationaryError(PhysicsError):
    """Trailing-decade flatness test failed; horizon too short."""


class NeverCrossesError(PhysicsError):
    """Series never reaches the requested fraction of its stationary value."""


class VlasovStableError(PhysicsError):
    """No positive growth rate: the homogeneous state is linearly stable."""


class NoExponentialStageError(PhysicsError):
    """No window of exponential growth detected in the series."""


class SamplerConvergenceError(PhysicsError):
    """Metropolis chain failed its burn-in diagnostic."""


class TrajectoryDivergedError(PhysicsError):
    """Non-finite state detected while integrating a trajectory."""
