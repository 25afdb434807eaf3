"""Exception hierarchy shared by all waveset modules."""

from __future__ import annotations


class WavesetError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(WavesetError, ValueError):
    """Malformed or inconsistent input (shapes, modes, parse failures)."""


class SingularMatrixError(ValidationError):
    pass


class EigenSolverError(WavesetError):
    """The eigenvalue solver failed to converge."""


class JordanAmbiguityError(WavesetError):
    """Numerical Jordan structure could not be decided at the working tolerance.

    ``clusters`` carries (eigenvalue, multiplicity, singular values) diagnostics.
    """

    def __init__(self, message: str, clusters=None):
        super().__init__(message)
        self.clusters = clusters or []


class CountCapExceeded(WavesetError):
    """Lattice enumeration hit the configured point cap.

    ``lower_bound`` is the number of points found before stopping.
    """

    def __init__(self, message: str, lower_bound: int):
        super().__init__(message)
        self.lower_bound = lower_bound


class AmbiguousMembershipError(WavesetError):
    """Irrational-mode lattice membership could not be decided numerically."""

    def __init__(self, message: str, near_misses=None):
        super().__init__(message)
        self.near_misses = near_misses or []


class WindowError(WavesetError):
    """A finite window of dilation powers cannot be certified."""

    def __init__(self, message: str, required=None):
        super().__init__(message)
        self.required = required


class PreconditionError(WavesetError):
    """An operation's documented precondition does not hold for the input."""


class ConstructionError(WavesetError):
    """An iterative construction stalled or violated its invariants."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class RuleConflictError(WavesetError):
    """Two proven decision rules returned contradictory verdicts."""


class BoundaryWarning(UserWarning):
    """A lattice point landed within numerical tolerance of a region boundary."""
