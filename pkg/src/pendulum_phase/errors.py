"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PendulumError(Exception):
    """Base class for every error raised by :mod:`pendulum_phase`."""


class DomainError(PendulumError, ValueError):
    """Arguments outside the region where an operation is defined."""


class NumericalError(PendulumError, RuntimeError):
    """A numerical procedure could not deliver a trustworthy answer."""


class StiffnessFailure(NumericalError):
    """The adaptive step size collapsed below the allowed floor."""


class ClassificationAmbiguous(NumericalError):
    """A separatrix shot ended without reaching any classifying event."""


class NoCycle(PendulumError):
    """No rotational periodic orbit exists for the requested parameters.

    ``evidence`` optionally carries the trajectory segment that fell onto
    the axis while probing the return map.
    """

    def __init__(self, message: str, evidence=None):
        super().__init__(message)
        self.evidence = evidence


class Degenerate(PendulumError):
    """Drive lies within tolerance of the saddle-connection value."""
