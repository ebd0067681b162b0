"""Nondimensional parameters, control quantities and critical-degree selection."""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Tuple

from .errors import CriticalAspectRatio, InvalidParameters

PI2 = math.pi**2

# Minimum of sigma_c(r) over all aspect ratios, reached when alpha^2 = pi^2 / 2.
SIGMA_C_MIN = 27.0 * math.pi**4 / 4.0

ASPECT_RATIO_TOL = 1e-9


def wavenumber_sq(l: int, r: float) -> float:
    """Horizontal wavenumber alpha_l^2 = l(l+1)/r^2 of degree l."""
    if r <= 0:
        raise InvalidParameters(f"aspect ratio must be positive, got {r}")
    if l < 0:
        raise InvalidParameters(f"degree must be nonnegative, got {l}")
    return l * (l + 1) / (r * r)


def threshold_radius(l: int) -> float:
    """Aspect ratio r_l at which degrees l and l+1 become critical together.

    Args:
        l: Degree (r_0 = 0 by convention)

    Returns:
        r_l
    """
    if l < 0:
        raise InvalidParameters(f"degree must be nonnegative, got {l}")
    if l == 0:
        return 0.0
    inner = (1 + l) * (
        math.cbrt(l * (2 + l) ** 2) + math.cbrt(l**2 * (2 + l))
    )
    return math.sqrt(inner / PI2)


def critical_degree(r: float) -> int:
    """Degree l_c with r_{l_c - 1} < r < r_{l_c}.

    Raises:
        CriticalAspectRatio: if r lies within 1e-9 of some r_l
    """
    if not r > 0:
        raise InvalidParameters(f"aspect ratio must be positive, got {r}")

    l = 1
    while True:
        r_l = threshold_radius(l)
        if abs(r - r_l) <= ASPECT_RATIO_TOL:
            raise CriticalAspectRatio(r, l)
        if r < r_l:
            return l
        l += 1


def sigma_degree(l: int, r: float) -> float:
    """Onset threshold (pi^2 + alpha_l^2)^3 / alpha_l^2 of a single degree."""
    if l < 1:
        raise InvalidParameters(f"degree must be >= 1, got {l}")
    alpha_sq = wavenumber_sq(l, r)
    return (PI2 + alpha_sq) ** 3 / alpha_sq


def sigma_crit(r: float) -> Tuple[float, int]:
    """Critical threshold sigma_c and the degree l_c that attains it."""
    l_c = critical_degree(r)
    return sigma_degree(l_c, r), l_c


def neighbour_gap(r: float) -> float:
    """Relative gap between sigma_c and the next-smallest degree threshold."""
    sigma_c, l_c = sigma_crit(r)
    neighbours = [l for l in (l_c - 1, l_c + 1) if l >= 1]
    return min(sigma_degree(l, r) for l in neighbours) / sigma_c - 1.0


class Regime(str, Enum):
    """Which branch of the first transition the parameters select."""

    STEADY = "SteadyMultiEquilibria"
    OSCILLATORY = "Oscillatory"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class Params:
    """Nondimensional system parameters.

    ``Rtilde`` is the magnitude of the saline Rayleigh number and ``s_sign``
    the sign of S0 - S1. Formulas use the signed product ``saline``.
    """

    Pr: float
    Le: float
    R: float
    Rtilde: float
    r: float
    s_sign: int = 1

    def __post_init__(self):
        for name in ("Pr", "Le", "R", "Rtilde", "r"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameters(f"{name} must be finite, got {value}")
        if self.Pr <= 0:
            raise InvalidParameters(f"Pr must be positive, got {self.Pr}")
        if self.Le <= 0:
            raise InvalidParameters(f"Le must be positive, got {self.Le}")
        if abs(self.Le - 1.0) < 1e-12:
            raise InvalidParameters("Le = 1 is excluded (R1 has a pole there)")
        if self.r <= 0:
            raise InvalidParameters(f"aspect ratio must be positive, got {self.r}")
        if self.Rtilde < 0:
            raise InvalidParameters(
                f"Rtilde is a magnitude and must be >= 0, got {self.Rtilde}"
            )
        if self.s_sign not in (1, -1):
            raise InvalidParameters(f"s_sign must be +1 or -1, got {self.s_sign}")

    @classmethod
    def at_sigma(
        cls, sigma: float, R: float, Le: float, Pr: float, r: float
    ) -> "Params":
        """Parameters with the saline term chosen so that sigma(params) = sigma."""
        saline = Le * (R - sigma)
        s_sign = 1 if saline >= 0 else -1
        return cls(Pr=Pr, Le=Le, R=R, Rtilde=abs(saline), r=r, s_sign=s_sign)

    @classmethod
    def at_criticality(cls, R: float, Le: float, Pr: float, r: float) -> "Params":
        """Parameters on the critical line sigma = sigma_c(r)."""
        sigma_c, _ = sigma_crit(r)
        return cls.at_sigma(sigma_c, R, Le, Pr, r)

    def with_sigma(self, sigma: float) -> "Params":
        """Same R, Le, Pr and r, moved to the requested sigma."""
        return Params.at_sigma(sigma, self.R, self.Le, self.Pr, self.r)

    def with_R(self, R: float) -> "Params":
        return replace(self, R=R)

    @property
    def saline(self) -> float:
        """Signed saline Rayleigh number s_sign * Rtilde."""
        return self.s_sign * self.Rtilde

    @property
    def sigma(self) -> float:
        return self.R - self.saline / self.Le

    @property
    def l_c(self) -> int:
        return critical_degree(self.r)

    def as_dict(self) -> dict:
        return {
            "Pr": self.Pr,
            "Le": self.Le,
            "R": self.R,
            "Rtilde": self.Rtilde,
            "r": self.r,
            "s_sign": self.s_sign,
        }


@dataclass(frozen=True)
class RegimeReport:
    """Control quantities that decide the type of the first transition."""

    sigma: float
    sigma_c: float
    l_c: int
    K: float
    R0: float
    R1: float
    eta: float
    eta_c: float
    regime: Regime


def threshold_rayleigh(
    Le: float, Pr: float, sigma_c: float
) -> Tuple[float, float]:
    """(R0, R1): the pole of the transition number and the zero of its l=0 term."""
    R0 = (Le + Pr) * sigma_c / ((1.0 - Le) * Pr)
    R1 = sigma_c / (1.0 - Le**2)
    return R0, R1


def regime(params: Params) -> RegimeReport:
    """Evaluate sigma, K, R0, R1, eta and eta_c for a parameter set."""
    sigma_c, l_c = sigma_crit(params.r)
    Le, Pr = params.Le, params.Pr
    saline = params.saline

    sign = 1.0 if Le < 1.0 else -1.0
    K = sign * (Le**2 / (1.0 - Le) * (1.0 + 1.0 / Pr) * sigma_c - saline)
    R0, R1 = threshold_rayleigh(Le, Pr, sigma_c)
    eta = params.R - (Pr + Le) * saline / (Pr + 1.0)
    eta_c = (Pr + Le) * (1.0 + Le) * sigma_c / Pr

    if K > 0:
        kind = Regime.STEADY
    elif K < 0:
        kind = Regime.OSCILLATORY
    else:
        kind = Regime.DEGENERATE

    return RegimeReport(
        sigma=params.sigma,
        sigma_c=sigma_c,
        l_c=l_c,
        K=K,
        R0=R0,
        R1=R1,
        eta=eta,
        eta_c=eta_c,
        regime=kind,
    )
