"""Exception types shared across the library."""

from __future__ import annotations


class IampcError(Exception):
    """Base class for every error raised by this package."""


class IntegrationFailureError(IampcError):
    """The fixed-step integrator produced a non-finite state component."""

    def __init__(self, message: str, state_index: int | None = None):
        super().__init__(message)
        self.state_index = state_index


class LinearizationFailureError(IampcError):
    """A finite-difference Jacobian came back non-finite."""


class ObservabilityError(IampcError):
    """The (A, C) pair is not observable, so no observer gain exists."""

    def __init__(self, message: str, rank: int | None = None):
        super().__init__(message)
        self.rank = rank


class UnsupportedDimensionError(IampcError):
    """The requested operation is only implemented for single-output models."""


class EstimatorFailureError(IampcError):
    """The innovation covariance became numerically singular."""


class CovarianceCorruptionError(IampcError):
    """A filter covariance lost positive definiteness."""


class SolverFailureError(IampcError):
    """The MPC solver produced a non-finite iterate."""


class ClosedLoopAbortError(IampcError):
    """A closed-loop run stopped early; carries the step index and partial log."""

    def __init__(self, message: str, step: int, partial_log=None):
        super().__init__(message)
        self.step = step
        self.partial_log = partial_log
