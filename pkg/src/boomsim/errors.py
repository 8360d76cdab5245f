"""Exception types shared across the package."""


class BoomsimError(Exception):
    """Base class for all package errors."""


class SingularMatrix(BoomsimError):
    """Undamped inverse requested at (or numerically at) a singular Jacobian."""


class NearSingularStiffness(BoomsimError):
    """Task-normal stiffness is unbounded: sin(theta1) below the guard value."""


class InvalidStiffness(BoomsimError):
    """A stiffness that must be positive is zero or negative."""


class UnstableTimestep(BoomsimError):
    """Admittance update called with dt * B / M >= 2 (velocity decay term
    outside (-1, 1); the discrete loop cannot be stable off the surface)."""


class JointLimitHit(BoomsimError):
    """Reserved; joint-limit clamping is reported as a flag, not raised."""


class EmptyWindow(BoomsimError):
    """Metric requested over a window containing no trace samples."""


class FitFailed(BoomsimError):
    """Transient too short, flat, or too noisy to identify."""


class ScenarioDiverged(BoomsimError):
    """Run tripped the divergence guard (reported via RunSummary.diverged)."""


class ConfigError(BoomsimError):
    """Scenario configuration file or override is invalid."""


class TimelineError(BoomsimError):
    """A controller callback raised during run_timeline.

    Carries the partial trace collected up to the failure so runs can be
    inspected post-mortem.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
