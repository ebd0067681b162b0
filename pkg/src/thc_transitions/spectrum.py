"""Linear stability spectrum: dispersion cubic, eigenvectors, adjoints and PES checks."""

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .errors import InvalidParameters, ScanInconclusive, SingularMode
from .params import PI2, Params, Regime, regime, sigma_crit, wavenumber_sq

DISCRIMINANT_RTOL = 1e-12
REPEATED_RTOL = 1e-8
SINGULAR_TOL = 1e-12
CRITICAL_ATOL = 1e-7


@dataclass(frozen=True)
class ModeIndex:
    """Address of one eigenpair: degree l, order m, vertical index n, branch k."""

    l: int
    m: int
    n: int
    k: int = 1

    def __post_init__(self):
        if self.l < 0 or self.n < 0:
            raise InvalidParameters(f"l and n must be nonnegative: {self}")
        if abs(self.m) > self.l:
            raise InvalidParameters(f"|m| must not exceed l: {self}")
        if self.l == 0 and self.n == 0:
            raise InvalidParameters("(l, n) = (0, 0) is not a mode")
        max_k = 2 if self.l == 0 else 3
        if not 1 <= self.k <= max_k:
            raise InvalidParameters(f"branch k must lie in 1..{max_k}: {self}")


@dataclass(frozen=True)
class SpectrumTriple:
    """Roots of the dispersion cubic for one (l, n), by descending real part."""

    l: int
    n: int
    betas: Tuple[complex, complex, complex]
    b: Tuple[float, float, float]
    repeated: bool = False

    @property
    def leading(self) -> complex:
        return self.betas[0]

    def residuals(self) -> List[float]:
        """|p(beta)| for each root of p(beta) = beta^3 + b2 beta^2 + b1 beta + b0."""
        b0, b1, b2 = self.b
        return [abs(((beta + b2) * beta + b1) * beta + b0) for beta in self.betas]


class MeanMode(NamedTuple):
    """Eigenvalue of a horizontally uniform (l = 0) mode and the field it lives in."""

    beta: float
    field: str


@dataclass(frozen=True)
class ModeCoefficients:
    """Amplitudes of one eigenvector relative to its vertical velocity profile.

    The velocity components scale as ``u_scale * grad Y cos(n pi z)`` and
    ``w_scale * Y sin(n pi z)``.
    """

    theta: complex
    phi: complex
    u_scale: float
    w_scale: float
    adjoint: bool = False


def dispersion_coefficients(
    l: int, n: int, params: Params
) -> Tuple[float, float, float]:
    """Coefficients (b0, b1, b2) of beta^3 + b2 beta^2 + b1 beta + b0 = 0."""
    if l < 1 or n < 1:
        raise InvalidParameters(f"dispersion cubic needs l >= 1 and n >= 1, got {l}, {n}")
    alpha_sq = wavenumber_sq(l, params.r)
    s = n * n * PI2 + alpha_sq
    Le, Pr, R, saline = params.Le, params.Pr, params.R, params.saline

    b0 = s**3 * Le * Pr - alpha_sq * Pr * (Le * R - saline)
    b1 = s**2 * (Le + Pr + Le * Pr) - alpha_sq * Pr * (R - saline) / s
    b2 = s * (1.0 + Le + Pr)
    return b0, b1, b2


def _polish(beta: complex, b0: float, b1: float, b2: float) -> complex:
    value = ((beta + b2) * beta + b1) * beta + b0
    slope = (3.0 * beta + 2.0 * b2) * beta + b1
    if slope == 0:
        return beta
    return beta - value / slope


def solve_cubic(b0: float, b1: float, b2: float) -> Tuple[List[complex], bool]:
    """Roots of the monic cubic beta^3 + b2 beta^2 + b1 beta + b0.

    Trigonometric form for three real roots, Cardano otherwise, then one
    Newton step per root.

    Returns:
        (roots sorted by descending real then imaginary part, repeated flag)
    """
    shift = b2 / 3.0
    p = b1 - b2 * b2 / 3.0
    q = 2.0 * b2**3 / 27.0 - b2 * b1 / 3.0 + b0
    half_q = q / 2.0
    third_p = p / 3.0
    disc = half_q**2 + third_p**3
    scale = max(half_q**2, abs(third_p) ** 3, np.finfo(float).tiny)

    if disc < -DISCRIMINANT_RTOL * scale:
        # three distinct real roots
        m = 2.0 * math.sqrt(-third_p)
        arg = 3.0 * q / (p * m)
        arg = min(1.0, max(-1.0, arg))
        angle = math.acos(arg) / 3.0
        roots = [
            complex(m * math.cos(angle - 2.0 * math.pi * k / 3.0) - shift)
            for k in range(3)
        ]
        roots = [complex(_polish(beta.real, b0, b1, b2)) for beta in roots]
    else:
        root_disc = math.sqrt(max(disc, 0.0))
        w = -half_q - root_disc if half_q > 0 else -half_q + root_disc
        u = math.cbrt(w)
        v = -third_p / u if u != 0 else 0.0
        real_root = _polish(complex(u + v - shift), b0, b1, b2).real
        pair = complex(-(u + v) / 2.0 - shift, math.sqrt(3.0) / 2.0 * abs(u - v))
        pair = _polish(pair, b0, b1, b2)
        roots = [complex(real_root), pair, pair.conjugate()]

    roots.sort(key=lambda beta: (-beta.real, -beta.imag))

    repeated = False
    for i in range(3):
        for j in range(i + 1, 3):
            size = max(1.0, abs(roots[i]), abs(roots[j]))
            if abs(roots[i] - roots[j]) <= REPEATED_RTOL * size:
                repeated = True
    return roots, repeated


def eigenvalues(l: int, n: int, params: Params) -> SpectrumTriple:
    """The three eigenvalues beta^k_{ln}, k = 1, 2, 3, ordered by real part."""
    b0, b1, b2 = dispersion_coefficients(l, n, params)
    roots, repeated = solve_cubic(b0, b1, b2)
    return SpectrumTriple(
        l=l, n=n, betas=tuple(roots), b=(b0, b1, b2), repeated=repeated
    )


def eigenvalue_shear(l: int, params: Params) -> float:
    """Eigenvalue -Pr alpha_l^2 of the z-independent toroidal mode (n = 0)."""
    if l < 1:
        raise InvalidParameters(f"shear modes need l >= 1, got {l}")
    return -params.Pr * wavenumber_sq(l, params.r)


def eigenvalues_horizontal_mean(n: int, params: Params) -> Tuple[MeanMode, MeanMode]:
    """Temperature-only and salinity-only eigenvalues of the l = 0 modes."""
    if n < 1:
        raise InvalidParameters(f"horizontal-mean modes need n >= 1, got {n}")
    base = n * n * PI2
    return MeanMode(-base, "T"), MeanMode(-params.Le * base, "S")


def mode_coefficients(
    idx: ModeIndex, beta: complex, params: Params, adjoint: bool = False
) -> ModeCoefficients:
    """Temperature and salinity amplitudes of a direct or adjoint eigenvector.

    Args:
        idx: Mode index with l >= 1 and n >= 1
        beta: Eigenvalue of the direct mode (the adjoint uses its conjugate)
        params: System parameters
        adjoint: Return the adjoint eigenvector instead

    Raises:
        SingularMode: if a denominator is below 1e-12 in magnitude
    """
    if idx.l < 1 or idx.n < 1:
        raise InvalidParameters(f"eigenvector amplitudes need l, n >= 1: {idx}")
    alpha_sq = wavenumber_sq(idx.l, params.r)
    s = idx.n**2 * PI2 + alpha_sq
    shifted = complex(beta).conjugate() if adjoint else complex(beta)

    den_t = s + shifted
    den_s = params.Le * s + shifted
    if abs(den_t) < SINGULAR_TOL or abs(den_s) < SINGULAR_TOL:
        raise SingularMode(f"eigenvector denominator vanishes for {idx} at beta={beta}")

    if adjoint:
        theta = params.Pr * params.R * alpha_sq / den_t
        phi = -params.Pr * params.saline * alpha_sq * params.s_sign / den_s
    else:
        theta = alpha_sq / den_t
        phi = params.s_sign * alpha_sq / den_s

    return ModeCoefficients(
        theta=theta,
        phi=phi,
        u_scale=idx.n * math.pi,
        w_scale=alpha_sq,
        adjoint=adjoint,
    )


def mode_residual(
    l: int, n: int, beta: complex, params: Params, z: Optional[Sequence[float]] = None
) -> float:
    """Largest relative residual of the linear equations for a direct mode.

    The vertical profiles sin(n pi z) and their derivatives are substituted
    into the momentum, heat and salt equations at the collocation points.
    """
    coeffs = mode_coefficients(ModeIndex(l, 0, n), beta, params)
    alpha_sq = wavenumber_sq(l, params.r)
    zs = np.linspace(0.05, 0.95, 19) if z is None else np.asarray(z, dtype=float)

    k = n * math.pi
    h = np.sin(k * zs)
    d2h = -(k**2) * h
    d4h = k**4 * h
    lap_h = d2h - alpha_sq * h
    lap2_h = d4h - 2.0 * alpha_sq * d2h + alpha_sq**2 * h
    temp = coeffs.theta * h
    salt = coeffs.phi * h

    momentum = params.Pr * (
        lap2_h - params.R * temp + params.s_sign * params.saline * salt
    ) - beta * lap_h
    heat = coeffs.theta * lap_h + alpha_sq * h - beta * temp
    salinity = params.Le * coeffs.phi * lap_h + params.s_sign * alpha_sq * h - beta * salt

    scale = max(
        1.0,
        float(np.max(np.abs(params.Pr * lap2_h))),
        float(np.max(np.abs(beta * lap_h))),
        float(np.max(np.abs(params.Pr * params.R * temp))),
    )
    worst = max(
        float(np.max(np.abs(momentum))),
        float(np.max(np.abs(heat))),
        float(np.max(np.abs(salinity))),
    )
    return worst / scale


def biorthogonality(l: int, n: int, params: Params) -> np.ndarray:
    """Gram matrix <Psi^k, Psi^{j*}> of the three branches of one (l, n).

    Off-diagonal entries vanish; the diagonal carries the normalisation
    used by the transition coefficients.
    """
    triple = eigenvalues(l, n, params)
    alpha_sq = wavenumber_sq(l, params.r)
    s = n * n * PI2 + alpha_sq
    Le, Pr = params.Le, params.Pr
    prefactor = 0.5 * params.r**2 * alpha_sq

    gram = np.zeros((3, 3), dtype=complex)
    for k, beta_k in enumerate(triple.betas):
        for j, beta_j in enumerate(triple.betas):
            thermal = params.R / ((s + beta_k) * (s + beta_j))
            saline = params.saline / ((Le * s + beta_k) * (Le * s + beta_j))
            gram[k, j] = prefactor * (s + alpha_sq * Pr * (thermal - saline))
    return gram


def spectrum_table(params: Params, l_max: int, n_max: int) -> pd.DataFrame:
    """Every eigenvalue with l <= l_max and n <= n_max as a DataFrame."""
    rows = []
    for n in range(1, n_max + 1):
        for mode_k, mode in enumerate(eigenvalues_horizontal_mean(n, params), start=1):
            rows.append(
                {"l": 0, "n": n, "k": mode_k, "re": mode.beta, "im": 0.0,
                 "family": f"mean_{mode.field}"}
            )
    for l in range(1, l_max + 1):
        rows.append(
            {"l": l, "n": 0, "k": 1, "re": eigenvalue_shear(l, params), "im": 0.0,
             "family": "shear"}
        )
        for n in range(1, n_max + 1):
            triple = eigenvalues(l, n, params)
            for k, beta in enumerate(triple.betas, start=1):
                rows.append(
                    {"l": l, "n": n, "k": k, "re": beta.real, "im": beta.imag,
                     "family": "cubic"}
                )
    return pd.DataFrame(rows, columns=["l", "n", "k", "re", "im", "family"])


@dataclass(frozen=True)
class PESRow:
    """Outcome of the spectrum scan at one value of sigma."""

    label: str
    sigma: float
    critical_re: float
    max_other_re: float
    argmax: Tuple[int, int, int]
    passed: bool


@dataclass
class PESReport:
    """Sign pattern of the spectrum below, at and above sigma_c."""

    l_c: int
    sigma_c: float
    l_max: int
    n_max: int
    rows: List[PESRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(row.passed for row in self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "label": row.label,
                    "sigma": row.sigma,
                    "critical_re": row.critical_re,
                    "max_other_re": row.max_other_re,
                    "argmax_k": row.argmax[0],
                    "argmax_l": row.argmax[1],
                    "argmax_n": row.argmax[2],
                    "passed": row.passed,
                }
                for row in self.rows
            ]
        )


def _scan(params: Params, l_c: int, l_max: int, n_max: int) -> Tuple[float, float, Tuple[int, int, int]]:
    """Leading critical real part and the largest real part of every other mode."""
    critical = math.nan
    best = -math.inf
    best_at = (0, 0, 0)

    def consider(value: float, at: Tuple[int, int, int]):
        nonlocal best, best_at
        if value > best:
            best, best_at = value, at

    # fixed index order keeps the reduction deterministic
    for n in range(1, n_max + 1):
        for k, mode in enumerate(eigenvalues_horizontal_mean(n, params), start=1):
            consider(mode.beta, (k, 0, n))
    for l in range(1, l_max + 1):
        consider(eigenvalue_shear(l, params), (1, l, 0))
        for n in range(1, n_max + 1):
            triple = eigenvalues(l, n, params)
            for k, beta in enumerate(triple.betas, start=1):
                if (k, l, n) == (1, l_c, 1):
                    critical = beta.real
                else:
                    consider(beta.real, (k, l, n))
    return critical, best, best_at


def verify_pes(
    params: Params, l_max: int = 50, n_max: int = 50, sigma_offset: float = 0.01
) -> PESReport:
    """Check the exchange of stabilities around sigma_c for fixed R, Le, Pr, r.

    The spectrum is scanned at sigma_c (1 - offset), sigma_c and
    sigma_c (1 + offset). Below sigma_c every mode must decay; at sigma_c the
    critical branch (1, l_c, 1) must sit at zero; above it only that branch
    may grow.

    Raises:
        InvalidParameters: outside the K > 0 regime or for too small a window
        ScanInconclusive: if the largest non-critical real part sits on the
            boundary of the scan window
    """
    sigma_c, l_c = sigma_crit(params.r)
    if l_max < 2 * l_c + 2 or n_max < 2 * l_c + 2:
        raise InvalidParameters(
            f"scan window must satisfy l_max, n_max >= {2 * l_c + 2}"
        )
    if regime(params.with_sigma(sigma_c)).regime is not Regime.STEADY:
        raise InvalidParameters("exchange of stabilities is checked for K > 0 only")

    report = PESReport(l_c=l_c, sigma_c=sigma_c, l_max=l_max, n_max=n_max)
    for label, factor in (("below", 1.0 - sigma_offset), ("at", 1.0), ("above", 1.0 + sigma_offset)):
        sigma = sigma_c * factor
        critical, best, best_at = _scan(params.with_sigma(sigma), l_c, l_max, n_max)
        _, l_at, n_at = best_at
        if l_at == l_max or n_at == n_max:
            raise ScanInconclusive(
                f"largest non-critical growth rate at (k,l,n)={best_at} lies on "
                f"the scan boundary (l_max={l_max}, n_max={n_max})"
            )

        if label == "below":
            passed = critical < 0 and best < 0
        elif label == "at":
            passed = abs(critical) <= CRITICAL_ATOL and best < 0
        else:
            passed = critical > 0 and best < 0

        report.rows.append(
            PESRow(
                label=label,
                sigma=sigma,
                critical_re=critical,
                max_other_re=best,
                argmax=best_at,
                passed=passed,
            )
        )
    return report


def leading_growth_rate(params: Params) -> float:
    """Real part of beta^1_{l_c,1}, the growth rate of the critical modes."""
    _, l_c = sigma_crit(params.r)
    return eigenvalues(l_c, 1, params).leading.real

