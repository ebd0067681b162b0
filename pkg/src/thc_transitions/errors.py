"""Exception hierarchy shared by the numerical modules and the CLI.

Every class carries the process exit code the CLI uses when the error
reaches the top level.
"""

from typing import Any, Optional


class ThcError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class DomainError(ThcError, ValueError):
    """Input outside the domain where a quantity is defined."""

    exit_code = 2


class InvalidParameters(DomainError):
    """Parameter values violate a Params invariant or an operation precondition."""


class CriticalAspectRatio(DomainError):
    """Aspect ratio sits on a threshold radius r_l (double-critical case)."""

    def __init__(self, r: float, l: int):
        self.r = r
        self.l = l
        super().__init__(
            f"aspect ratio r={r:.12g} coincides with threshold radius r_{l}; "
            "the critical degree is not unique"
        )


class PoleAtR0(DomainError):
    """R is within the guard band of the pole at R0."""


class SingularMode(DomainError):
    """Eigenvector denominator vanishes (resonant degeneracy)."""


class SingularBranch(DomainError):
    """A branch term beta*f of an interaction sum vanishes."""


class UnsupportedInteraction(DomainError):
    """No closed form exists for the requested (l_c, l) interaction."""


class UnsupportedDegree(DomainError):
    """Transition numbers are only available for l_c in {1, 2}."""


class NoSignChange(DomainError):
    """The transition number keeps one sign over the whole search bracket."""


class TypeIIRegime(DomainError):
    """Operation requires a continuous (Type-I) transition."""


class ConstraintViolated(DomainError):
    """Amplitudes violate the reality constraint x_{-m} = (-1)^m conj(x_m)."""


class EmptySweep(DomainError):
    """No grid point of a sweep lies in the admissible region."""


class OracleFailure(ThcError):
    """A numerical self-check or reference comparison failed."""

    exit_code = 1


class ScanInconclusive(OracleFailure):
    """The extremum of a finite scan sits on the scan boundary."""


class ToleranceExceeded(OracleFailure):
    """A computed value differs from its reference beyond tolerance."""


class Diverged(ThcError):
    """Amplitude blew up during integration (expected for Type-II runs)."""

    exit_code = 3

    def __init__(self, message: str, trajectory: Optional[Any] = None):
        super().__init__(message)
        self.trajectory = trajectory
