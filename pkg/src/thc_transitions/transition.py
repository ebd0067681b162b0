"""Transition numbers q_1, q_2 and the center-manifold coefficients behind them.

A D-term D_{(l_c,1),(l,2)} measures how the quadratic interaction of the
critical modes (degree l_c, n = 1) with the modes (l, n = 2) feeds back on
the critical modes. The transition number q_{l_c} is their sum and its sign
decides between a continuous (Type-I) and a drastic (Type-II) transition.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import bisect

from .errors import (
    InvalidParameters,
    NoSignChange,
    PoleAtR0,
    SingularBranch,
    ToleranceExceeded,
    UnsupportedDegree,
    UnsupportedInteraction,
)
from .harmonics import gaunt_closed_form
from .params import (
    PI2,
    Params,
    Regime,
    critical_degree,
    regime,
    sigma_crit,
    threshold_rayleigh,
    wavenumber_sq,
)
from .spectrum import ModeIndex, eigenvalues, mode_coefficients

# Degrees l of the n = 2 modes excited by the critical modes, per l_c.
INTERACTION_DEGREES: Dict[int, Tuple[int, ...]] = {1: (2,), 2: (2, 4)}

# Prefactors as printed next to the q_1 and q_2 formulas. Kept for
# comparison only; interaction_prefactor() gives the values that reproduce
# the tabulated D-terms.
PRINTED_PREFACTORS: Dict[Tuple[int, int], float] = {
    (1, 2): 3.0 * math.pi / (40.0 * math.sqrt(2.0)),
    (2, 2): 45.0 * math.pi / 784.0,
    (2, 4): -5.0 * math.pi / 42.0,
}

# Closed-form factors of A22, B22 and B42 in front of c / (beta f).
CM_FACTORS: Dict[Tuple[int, int], float] = {
    (1, 2): -0.25 * math.sqrt(3.0 * math.pi / 10.0),
    (2, 2): 3.0 * math.sqrt(5.0 * math.pi) / 56.0,
    (2, 4): -math.sqrt(5.0 * math.pi / 14.0) / 6.0,
}

# Normalisation of the quadratic forms multiplying A22, B22 and B42
# relative to the Gaunt contraction sum_{m2+m3=mu} x_m2 x_m3 G(l_c m2, l_c m3, l mu).
QUADRATIC_WEIGHTS: Dict[Tuple[int, int], float] = {
    (1, 2): math.sqrt(2.0 / 3.0),
    (2, 2): -2.0,
    (2, 4): 3.0 * math.sqrt(2.0 / 35.0),
}

POLE_RTOL = 1e-9
NEAR_POLE_RTOL = 1e-4
MARGINAL_ATOL = 1e-10
REALNESS_RTOL = 1e-9
SINGULAR_TOL = 1e-12
DECOUPLED_RTOL = 1e-6


class Classification(str, Enum):
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"
    MARGINAL = "Marginal"


def zero_mode_label(l_c: int) -> str:
    return f"({l_c},1),(0,2)"


def interaction_label(l_c: int, l: int) -> str:
    return f"({l_c},1),({l},2)"


@dataclass(frozen=True)
class AuxCoefficients:
    """Coefficients a, b, c, f per interaction degree and branch, plus g."""

    l_c: int
    alpha_c_sq: float
    R0: float
    g: float
    beta: Dict[int, Tuple[complex, complex, complex]]
    a: Dict[int, Tuple[complex, complex, complex]]
    b: Dict[int, Tuple[complex, complex, complex]]
    c: Dict[int, Tuple[complex, complex, complex]]
    f: Dict[int, Tuple[complex, complex, complex]]
    decoupled: Dict[int, Tuple[bool, bool, bool]] = field(default_factory=dict)

    def branch_inverse(self, l: int) -> List[complex]:
        """1 / (beta f) per branch; zero on a decoupled salinity branch."""
        flags = self.decoupled.get(l, (False,) * len(self.beta[l]))
        inverse = []
        for beta, f, decoupled in zip(self.beta[l], self.f[l], flags):
            if decoupled:
                inverse.append(0j)
                continue
            if abs(beta * f) < SINGULAR_TOL:
                raise SingularBranch(f"beta*f vanishes on a branch of degree {l}")
            inverse.append(1.0 / (beta * f))
        return inverse

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(self.beta)


@dataclass(frozen=True)
class CenterManifoldCoeffs:
    """A02 for the l = 0 mode and the per-branch coefficients of the (l, 2) modes."""

    l_c: int
    a02: Tuple[float, float]
    higher: Dict[int, Tuple[complex, complex, complex]]
    beta: Dict[int, Tuple[complex, complex, complex]]

    @property
    def A22(self) -> Tuple[complex, complex, complex]:
        if self.l_c != 1:
            raise AttributeError("A22 exists for l_c = 1 only")
        return self.higher[2]

    @property
    def B22(self) -> Tuple[complex, complex, complex]:
        if self.l_c != 2:
            raise AttributeError("B22 exists for l_c = 2 only")
        return self.higher[2]

    @property
    def B42(self) -> Tuple[complex, complex, complex]:
        if self.l_c != 2:
            raise AttributeError("B42 exists for l_c = 2 only")
        return self.higher[4]


@dataclass
class TransitionReport:
    """Transition number, its decomposition and the resulting classification."""

    l_c: int
    params: Params
    q: float
    d_terms: Dict[str, float]
    classification: Classification
    beta_critical: float
    attractor_radius_sq: Optional[float]
    cm_coeffs: CenterManifoldCoeffs
    near_pole: bool = False
    imag_residue: float = 0.0

    def to_dict(self) -> dict:
        return {
            "l_c": self.l_c,
            "q": self.q,
            "d_terms": dict(self.d_terms),
            "classification": self.classification.value,
            "beta_critical": self.beta_critical,
            "attractor_radius_sq": self.attractor_radius_sq,
            "near_pole": self.near_pole,
        }


def _check_lc(l_c: int, params: Params):
    if l_c >= 3:
        raise UnsupportedDegree(
            f"transition numbers are available for l_c in {{1, 2}}, got {l_c}"
        )
    if l_c < 1:
        raise InvalidParameters(f"critical degree must be >= 1, got {l_c}")
    actual = critical_degree(params.r)
    if actual != l_c:
        raise InvalidParameters(
            f"aspect ratio r={params.r:.6g} selects l_c={actual}, not {l_c}"
        )


def _check_pole(params: Params, R0: float):
    if abs(R0 - params.R) < POLE_RTOL * abs(R0):
        raise PoleAtR0(f"R={params.R!r} lies within the guard band of R0={R0!r}")


def aux_coefficients(l_c: int, params: Params) -> AuxCoefficients:
    """Evaluate a, b, c, f for every interaction degree and branch, and g."""
    _check_lc(l_c, params)
    sigma_c, _ = sigma_crit(params.r)
    R0, _ = threshold_rayleigh(params.Le, params.Pr, sigma_c)
    _check_pole(params, R0)

    Le, Pr, R, saline = params.Le, params.Pr, params.R, params.saline
    alpha_c_sq = wavenumber_sq(l_c, params.r)
    p_c = PI2 + alpha_c_sq

    betas, a_map, b_map, c_map, f_map, flags = {}, {}, {}, {}, {}, {}
    for l in INTERACTION_DEGREES[l_c]:
        alpha_sq = wavenumber_sq(l, params.r)
        s = 4.0 * PI2 + alpha_sq
        triple = eigenvalues(l, 2, params).betas
        a_k = tuple(Le * s + beta for beta in triple)
        b_k = tuple(s + beta for beta in triple)
        c_k, f_k, decoupled = [], [], []
        for beta, a, b in zip(triple, a_k, b_k):
            if abs(a) > DECOUPLED_RTOL * Le * s:
                salt = saline / a
            else:
                # saline / a taken from the dispersion relation; finite as Rtilde -> 0
                salt = R / b - s * (beta + Pr * s) / (alpha_sq * Pr)
            c_k.append(
                alpha_c_sq**2 / p_c**2 * (params.sigma + p_c * Pr * (R / b - salt / Le))
            )
            decoupled.append(a == 0)
            f_k.append(
                complex(math.inf)
                if a == 0
                else 4.0 * PI2 + alpha_sq * (1.0 + Pr * (R / b**2 - salt / a))
            )
        betas[l], a_map[l], b_map[l] = triple, a_k, b_k
        c_map[l], f_map[l], flags[l] = tuple(c_k), tuple(f_k), tuple(decoupled)

    g = alpha_c_sq / p_c**2 * Pr * (1.0 - Le) / Le * (R0 - R)

    return AuxCoefficients(
        l_c=l_c,
        alpha_c_sq=alpha_c_sq,
        R0=R0,
        g=g,
        beta=betas,
        a=a_map,
        b=b_map,
        c=c_map,
        f=f_map,
        decoupled=flags,
    )


def d_zero_mode(l_c: int, params: Params) -> float:
    """Interaction of the critical modes with the horizontally uniform mode (0, 2)."""
    sigma_c, _ = sigma_crit(params.r)
    R0, R1 = threshold_rayleigh(params.Le, params.Pr, sigma_c)
    _check_pole(params, R0)
    alpha_c_sq = wavenumber_sq(l_c, params.r)
    Le = params.Le
    return (
        (1.0 + Le)
        * alpha_c_sq**2
        * (R1 - params.R)
        / (16.0 * math.pi * Le * (R0 - params.R))
    )


def interaction_prefactor(l_c: int, l: int) -> float:
    """Angular prefactor of D_{(l_c,1),(l,2)} in front of (1/g) sum_k c^2/(beta f).

    Equals -(pi^2/4) lambda^2 (alpha_l^2/alpha_c^2) G^2 with
    lambda = 2 - alpha_l^2 / (2 alpha_c^2) and G the Gaunt coefficient
    G(l_c 0, l_c 0, l 0). Independent of the aspect ratio.
    """
    if l not in INTERACTION_DEGREES.get(l_c, ()):
        raise UnsupportedInteraction(f"no closed form for interaction (l_c={l_c}, l={l})")
    ratio = l * (l + 1) / (l_c * (l_c + 1))
    lam = 2.0 - ratio / 2.0
    gaunt = gaunt_closed_form((l_c, 0), (l_c, 0), (l, 0))
    return -(math.pi**2) / 4.0 * lam**2 * ratio * gaunt**2


def _branch_sum(terms: Iterable[complex]) -> Tuple[float, float]:
    total = complex(sum(terms))
    residue = abs(total.imag)
    if residue > REALNESS_RTOL * max(abs(total), np.finfo(float).tiny):
        raise ToleranceExceeded(
            f"branch sum {total} is not real (imaginary residue {residue:.3g})"
        )
    return total.real, residue


def _branch_terms(aux: AuxCoefficients, l: int) -> List[complex]:
    return [c * c * inverse for c, inverse in zip(aux.c[l], aux.branch_inverse(l))]


def d_higher(
    l_c: int, l: int, params: Params, aux: Optional[AuxCoefficients] = None
) -> float:
    """Interaction of the critical modes with the modes (l, 2), l in {2, 4}."""
    if l not in INTERACTION_DEGREES.get(l_c, ()):
        raise UnsupportedInteraction(f"no closed form for interaction (l_c={l_c}, l={l})")
    aux = aux or aux_coefficients(l_c, params)
    total, _ = _branch_sum(_branch_terms(aux, l))
    return interaction_prefactor(l_c, l) * total / aux.g


def center_manifold_coeffs(
    l_c: int, params: Params, aux: Optional[AuxCoefficients] = None
) -> CenterManifoldCoeffs:
    """Leading coefficients of the center-manifold function."""
    aux = aux or aux_coefficients(l_c, params)
    alpha_c_sq = aux.alpha_c_sq
    a02_t = alpha_c_sq**2 / (16.0 * PI2 * (PI2 + alpha_c_sq))
    a02_s = params.s_sign * a02_t / params.Le**2

    higher = {}
    for l in aux.degrees:
        factor = CM_FACTORS[(l_c, l)]
        higher[l] = tuple(
            factor * c * inverse for c, inverse in zip(aux.c[l], aux.branch_inverse(l))
        )
    return CenterManifoldCoeffs(
        l_c=l_c, a02=(a02_t, a02_s), higher=higher, beta=dict(aux.beta)
    )


def center_manifold_amplitudes(
    cm: CenterManifoldCoeffs, x: np.ndarray
) -> Dict[Tuple[int, int, int], complex]:
    """Amplitudes y^k_{l mu} of the center-manifold function at critical amplitudes x.

    Args:
        cm: Center-manifold coefficients
        x: Critical amplitudes x_m, m = -l_c..l_c, stored at index m + l_c

    Returns:
        Map (l, mu, k) -> amplitude; the l = 0 entries use mu = 0, k in {1, 2}
    """
    l_c = cm.l_c
    x = np.asarray(x, dtype=complex)
    if x.shape != (2 * l_c + 1,):
        raise InvalidParameters(f"expected {2 * l_c + 1} amplitudes, got {x.shape}")

    def amp(m: int) -> complex:
        return x[m + l_c]

    mean = sum((-1) ** m * amp(m) * amp(-m) for m in range(-l_c, l_c + 1))
    result = {(0, 0, 1): cm.a02[0] * mean, (0, 0, 2): cm.a02[1] * mean}

    for l, coeffs in cm.higher.items():
        weight = QUADRATIC_WEIGHTS[(l_c, l)] / gaunt_closed_form(
            (l_c, 0), (l_c, 0), (l, 0)
        )
        for mu in range(-l, l + 1):
            form = 0j
            for m2 in range(-l_c, l_c + 1):
                m3 = mu - m2
                if abs(m3) > l_c:
                    continue
                form += amp(m2) * amp(m3) * gaunt_closed_form((l_c, m2), (l_c, m3), (l, mu))
            for k, coeff in enumerate(coeffs, start=1):
                result[(l, mu, k)] = coeff * weight * form
    return result


def recombined_d_terms(
    l_c: int,
    params: Params,
    aux: Optional[AuxCoefficients] = None,
    cm: Optional[CenterManifoldCoeffs] = None,
) -> Dict[str, float]:
    """D-terms rebuilt from the center-manifold coefficients.

    The l = 0 term projects the A02 contribution onto the critical adjoint
    mode; the higher terms contract the A22/B22/B42 branches with c.
    """
    aux = aux or aux_coefficients(l_c, params)
    cm = cm or center_manifold_coeffs(l_c, params, aux)
    adjoint = mode_coefficients(ModeIndex(l_c, 0, 1), 0.0, params, adjoint=True)

    zero = math.pi * (adjoint.theta * cm.a02[0] + adjoint.phi * cm.a02[1]) / aux.g
    terms = {zero_mode_label(l_c): float(np.real(zero))}

    for l in aux.degrees:
        ratio = l * (l + 1) / (l_c * (l_c + 1))
        lam = 2.0 - ratio / 2.0
        gaunt = gaunt_closed_form((l_c, 0), (l_c, 0), (l, 0))
        angular = math.pi / 2.0 * lam * ratio * gaunt * QUADRATIC_WEIGHTS[(l_c, l)]
        total, _ = _branch_sum(c * coeff for c, coeff in zip(aux.c[l], cm.higher[l]))
        terms[interaction_label(l_c, l)] = angular * total / aux.g
    return terms


def classify(q: float) -> Classification:
    if abs(q) < MARGINAL_ATOL:
        return Classification.MARGINAL
    return Classification.TYPE_I if q > 0 else Classification.TYPE_II


def transition_number(l_c: int, params: Params) -> TransitionReport:
    """Transition number q_{l_c} with its D-term decomposition.

    Raises:
        UnsupportedDegree: for l_c >= 3
        InvalidParameters: outside the K > 0 regime
        PoleAtR0: within the guard band of R0
    """
    _check_lc(l_c, params)
    R0, _ = threshold_rayleigh(params.Le, params.Pr, sigma_crit(params.r)[0])
    _check_pole(params, R0)
    report = regime(params)
    if report.regime is not Regime.STEADY:
        raise InvalidParameters(
            f"transition numbers need K > 0 (got K={report.K:.6g})"
        )

    aux = aux_coefficients(l_c, params)
    d_terms = {zero_mode_label(l_c): d_zero_mode(l_c, params)}
    residue = 0.0
    for l in aux.degrees:
        total, imag = _branch_sum(_branch_terms(aux, l))
        residue = max(residue, imag)
        d_terms[interaction_label(l_c, l)] = interaction_prefactor(l_c, l) * total / aux.g

    q = math.fsum(d_terms.values())
    classification = classify(q)
    beta_critical = eigenvalues(l_c, 1, params).leading.real

    radius_sq = None
    if (
        classification is Classification.TYPE_I
        and params.sigma > report.sigma_c
        and beta_critical > 0
    ):
        radius_sq = beta_critical / q

    return TransitionReport(
        l_c=l_c,
        params=params,
        q=q,
        d_terms=d_terms,
        classification=classification,
        beta_critical=beta_critical,
        attractor_radius_sq=radius_sq,
        cm_coeffs=center_manifold_coeffs(l_c, params, aux),
        near_pole=abs(aux.R0 - params.R) < NEAR_POLE_RTOL * abs(aux.R0),
        imag_residue=residue,
    )


def critical_R_star(l_c: int, Le: float, Pr: float, r: float) -> float:
    """Thermal Rayleigh number where q_{l_c} changes sign on the critical line.

    Raises:
        NoSignChange: for Le > 1, or when q keeps one sign on the bracket
    """
    if Le > 1.0:
        raise NoSignChange(f"q_{l_c} does not change sign for Le > 1 (Le={Le})")
    sigma_c, _ = sigma_crit(r)
    R0, _ = threshold_rayleigh(Le, Pr, sigma_c)

    # Rtilde = Le (R - sigma_c) runs from zero at the lower end
    low = sigma_c
    high = R0 * (1.0 - 1e-6)

    def q_at(R: float) -> float:
        return transition_number(l_c, Params.at_criticality(R, Le, Pr, r)).q

    q_low, q_high = q_at(low), q_at(high)
    if np.sign(q_low) == np.sign(q_high):
        raise NoSignChange(
            f"q_{l_c} keeps one sign on [{low:.6g}, {high:.6g}] (Le={Le}, Pr={Pr})"
        )
    return float(bisect(q_at, low, high, xtol=1e-6))


@dataclass
class SweepRow:
    """Transition number at one point of an R sweep on the critical line."""

    R: float
    q: float
    d_terms: Dict[str, float] = field(default_factory=dict)
    classification: str = ""
    near_pole: bool = False
    pole_guard: bool = False


def sweep_row(l_c: int, Le: float, Pr: float, r: float, R: float) -> SweepRow:
    """q and its decomposition at R, flagging points inside the R0 guard band."""
    params = Params.at_criticality(R, Le, Pr, r)
    try:
        report = transition_number(l_c, params)
    except PoleAtR0:
        labels = [zero_mode_label(l_c)] + [
            interaction_label(l_c, l) for l in INTERACTION_DEGREES[l_c]
        ]
        return SweepRow(
            R=R,
            q=math.nan,
            d_terms=dict.fromkeys(labels, math.nan),
            classification="",
            near_pole=True,
            pole_guard=True,
        )
    return SweepRow(
        R=R,
        q=report.q,
        d_terms=report.d_terms,
        classification=report.classification.value,
        near_pole=report.near_pole,
    )


def rows_to_frame(rows: List[SweepRow]) -> pd.DataFrame:
    records = []
    for row in rows:
        record = {"R": row.R, "q": row.q}
        record.update({f"D{label}": value for label, value in row.d_terms.items()})
        record.update(
            {
                "classification": row.classification,
                "near_pole": row.near_pole,
                "pole_guard": row.pole_guard,
            }
        )
        records.append(record)
    return pd.DataFrame(records)


def transition_sweep(
    l_c: int, Le: float, Pr: float, r: float, R_values: Iterable[float]
) -> pd.DataFrame:
    """q_{l_c} over a list of R on the critical line, in input order."""
    return rows_to_frame([sweep_row(l_c, Le, Pr, r, float(R)) for R in R_values])
