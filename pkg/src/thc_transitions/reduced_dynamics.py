"""Reduced amplitude equations on the center manifold and field reconstruction."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .errors import ConstraintViolated, Diverged, InvalidParameters, TypeIIRegime
from .harmonics import ylm, ylm_gradient
from .params import Params, sigma_crit, wavenumber_sq
from .spectrum import ModeIndex, eigenvalues, mode_coefficients
from .transition import (
    CenterManifoldCoeffs,
    Classification,
    center_manifold_amplitudes,
    transition_number,
)

REALITY_TOL = 1e-9
DIVERGENCE_RADIUS_SQ = 1e12
POLE_CLEARANCE = 1e-6
CRITICAL_BETA_ATOL = 1e-10


@dataclass
class AmplitudeState:
    """Critical amplitudes x_m, m = -l_c..l_c, stored at index m + l_c."""

    l_c: int
    x: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=complex)
        if self.x.shape != (2 * self.l_c + 1,):
            raise InvalidParameters(
                f"l_c={self.l_c} needs {2 * self.l_c + 1} amplitudes, got {self.x.shape}"
            )

    @classmethod
    def zero(cls, l_c: int) -> "AmplitudeState":
        return cls(l_c, np.zeros(2 * l_c + 1, dtype=complex))

    @classmethod
    def from_components(cls, l_c: int, components: Dict[int, complex]) -> "AmplitudeState":
        """Build a state from x_m for m >= 0; negative orders follow by reality."""
        x = np.zeros(2 * l_c + 1, dtype=complex)
        for m, value in components.items():
            if m < 0 or m > l_c:
                raise InvalidParameters(f"order m={m} outside 0..{l_c}")
            if m == 0 and complex(value).imag != 0:
                raise InvalidParameters("x_0 must be real")
            x[m + l_c] = value
            x[-m + l_c] = (-1) ** m * np.conj(value)
        return cls(l_c, x)

    def component(self, m: int) -> complex:
        return complex(self.x[m + self.l_c])

    @property
    def radius_sq(self) -> float:
        return float(np.sum(np.abs(self.x) ** 2))

    def reality_residual(self) -> float:
        return reality_residual(self.x, self.l_c)


def reality_residual(x: np.ndarray, l_c: int) -> float:
    """max_m |x_{-m} - (-1)^m conj(x_m)|."""
    worst = 0.0
    for m in range(0, l_c + 1):
        mirrored = (-1) ** m * np.conj(x[m + l_c])
        worst = max(worst, abs(x[-m + l_c] - mirrored))
    return float(worst)


def project_reality(x: np.ndarray, l_c: int) -> np.ndarray:
    """Nearest amplitudes satisfying x_{-m} = (-1)^m conj(x_m)."""
    x = np.array(x, dtype=complex)
    x[l_c] = x[l_c].real
    for m in range(1, l_c + 1):
        sign = (-1) ** m
        avg = 0.5 * (x[m + l_c] + sign * np.conj(x[-m + l_c]))
        x[m + l_c] = avg
        x[-m + l_c] = sign * np.conj(avg)
    return x


def _rhs(x: np.ndarray, beta: float, q: float) -> np.ndarray:
    return beta * x - q * x * np.sum(np.abs(x) ** 2)


def reduced_rhs(state: AmplitudeState, beta: float, q: float) -> np.ndarray:
    """dx_m/dt = beta x_m - q x_m |x|^2 at the given state."""
    if state.reality_residual() > REALITY_TOL:
        raise ConstraintViolated(
            f"amplitudes violate the reality constraint by {state.reality_residual():.3g}"
        )
    return _rhs(state.x, beta, q)


def reduced_rhs_explicit(state: AmplitudeState, beta: float, q: float) -> np.ndarray:
    """Same right-hand side written with sum_m (-1)^m x_m x_{-m} instead of |x|^2."""
    l_c = state.l_c
    x = state.x
    quadratic = sum((-1) ** m * x[m + l_c] * x[-m + l_c] for m in range(-l_c, l_c + 1))
    return beta * x - q * x * quadratic


def rk4_step(
    rhs: Callable[[np.ndarray], np.ndarray], x: np.ndarray, dt: float
) -> np.ndarray:
    f1 = rhs(x)
    f2 = rhs(x + 0.5 * dt * f1)
    f3 = rhs(x + 0.5 * dt * f2)
    f4 = rhs(x + dt * f3)
    return x + dt * (f1 + 2.0 * f2 + 2.0 * f3 + f4) / 6.0


@dataclass
class Trajectory:
    """Sampled solution of the reduced equations."""

    l_c: int
    times: np.ndarray
    states: np.ndarray
    dt: float

    @property
    def radius_sq(self) -> np.ndarray:
        return np.sum(np.abs(self.states) ** 2, axis=1)

    @property
    def final(self) -> AmplitudeState:
        return AmplitudeState(self.l_c, self.states[-1].copy(), float(self.times[-1]))

    def to_frame(self) -> pd.DataFrame:
        data = {"t": self.times}
        for m in range(-self.l_c, self.l_c + 1):
            data[f"re_x[{m}]"] = self.states[:, m + self.l_c].real
            data[f"im_x[{m}]"] = self.states[:, m + self.l_c].imag
        data["radius_sq"] = self.radius_sq
        return pd.DataFrame(data)


def integrate(
    state0: AmplitudeState,
    beta: float,
    q: float,
    dt: float,
    horizon: float,
    stride: int = 1,
) -> Trajectory:
    """Classic fourth-order Runge-Kutta with the reality constraint re-imposed each step.

    The step is shortened so that a whole number of steps spans the horizon.

    Raises:
        InvalidParameters: if dt <= 0 or dt |beta| >= 0.1
        Diverged: once |x|^2 exceeds 1e12; carries the trajectory so far
    """
    if dt <= 0 or dt * abs(beta) >= 0.1:
        raise InvalidParameters(f"step dt={dt} must satisfy 0 < dt |beta| < 0.1")
    if horizon < 0 or stride < 1:
        raise InvalidParameters("horizon must be >= 0 and stride >= 1")

    l_c = state0.l_c
    n_steps = max(1, int(math.ceil(horizon / dt - 1e-9)))
    h = horizon / n_steps

    x = project_reality(state0.x, l_c)
    times = [state0.t]
    samples = [x.copy()]

    def rhs(y: np.ndarray) -> np.ndarray:
        return _rhs(y, beta, q)

    for step in range(1, n_steps + 1):
        x = project_reality(rk4_step(rhs, x, h), l_c)
        radius_sq = float(np.sum(np.abs(x) ** 2))
        if not math.isfinite(radius_sq) or radius_sq > DIVERGENCE_RADIUS_SQ:
            times.append(state0.t + step * h)
            samples.append(x.copy())
            partial = Trajectory(l_c, np.array(times), np.array(samples), h)
            raise Diverged(
                f"|x|^2 exceeded {DIVERGENCE_RADIUS_SQ:.0e} at t={times[-1]:.6g}",
                trajectory=partial,
            )
        if step % stride == 0 or step == n_steps:
            times.append(state0.t + step * h)
            samples.append(x.copy())

    return Trajectory(l_c, np.array(times), np.array(samples), h)


def logistic_radius(r0_sq: float, beta: float, q: float, t) -> np.ndarray:
    """|x(t)|^2 solving d|x|^2/dt = 2 beta |x|^2 - 2 q |x|^4 from |x(0)|^2 = r0_sq."""
    t = np.asarray(t, dtype=float)
    excess = np.expm1(2.0 * beta * t)
    # excess / beta tends to 2t as beta -> 0
    ratio = excess / beta if beta != 0 else 2.0 * t
    return r0_sq * (1.0 + excess) / (1.0 + q * r0_sq * ratio)


def random_state(l_c: int, radius_sq: float, rng: np.random.Generator) -> AmplitudeState:
    """Random amplitudes obeying the reality constraint with |x|^2 = radius_sq."""
    raw = rng.standard_normal(2 * l_c + 1) + 1j * rng.standard_normal(2 * l_c + 1)
    x = project_reality(raw, l_c)
    norm_sq = float(np.sum(np.abs(x) ** 2))
    return AmplitudeState(l_c, x * math.sqrt(radius_sq / norm_sq))


@dataclass
class AttractorReport:
    """Terminal radii of a multi-start integration of the reduced equations."""

    l_c: int
    sigma: float
    beta: float
    q: float
    target_radius_sq: float
    initial_radius_sq: List[float]
    terminal_radius_sq: List[float]
    direction_spread: float
    seed: int
    dt: float
    horizon: float
    rtol: float
    passed: bool = False
    final_states: List[np.ndarray] = field(default_factory=list, repr=False)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "start": np.arange(1, len(self.terminal_radius_sq) + 1),
                "initial_radius_sq": self.initial_radius_sq,
                "terminal_radius_sq": self.terminal_radius_sq,
                "target_radius_sq": self.target_radius_sq,
            }
        )


def _direction_spread(states: Sequence[np.ndarray]) -> float:
    units = [s / np.linalg.norm(s) for s in states if np.linalg.norm(s) > 0]
    spread = 0.0
    for i in range(len(units)):
        for j in range(i + 1, len(units)):
            spread = max(spread, float(np.linalg.norm(units[i] - units[j])))
    return spread


def attractor_check(
    l_c: int,
    params: Params,
    sigma_offset: float,
    n_starts: int = 20,
    seed: int = 20240101,
    rtol: float = 1e-4,
    workers: int = 1,
) -> AttractorReport:
    """Integrate from random starts at sigma_c + sigma_offset and compare radii with beta/q.

    Raises:
        TypeIIRegime: if q is not positive there
    """
    if sigma_offset < 0:
        raise InvalidParameters(f"sigma_offset must be >= 0, got {sigma_offset}")
    sigma_c, _ = sigma_crit(params.r)
    shifted = params.with_sigma(sigma_c + sigma_offset)
    report = transition_number(l_c, shifted)
    if report.classification is not Classification.TYPE_I:
        raise TypeIIRegime(
            f"attractor check needs q > 0, got q={report.q:.6g} ({report.classification.value})"
        )
    beta, q = report.beta_critical, report.q

    rng = np.random.default_rng(seed)
    # beta within round-off of zero counts as criticality; the decay is then algebraic
    if beta > CRITICAL_BETA_ATOL:
        target = beta / q
        radii = rng.uniform(0.2, 2.0, n_starts) * target
        horizon = 10.0 / beta
    else:
        target = 0.0
        radii = rng.uniform(0.5, 1.0, n_starts) * 1e-2
        horizon = 10.0 / (q * float(radii.min()))
    starts = [random_state(l_c, float(r0), rng) for r0 in radii]
    dt = 0.05 / max(abs(beta), q * float(radii.max()), np.finfo(float).tiny)

    def run(state: AmplitudeState) -> np.ndarray:
        return integrate(state, beta, q, dt, horizon, stride=10**9).states[-1]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            finals = list(pool.map(run, starts))
    else:
        finals = [run(state) for state in starts]

    terminal = [float(np.sum(np.abs(x) ** 2)) for x in finals]
    if target > 0:
        passed = all(abs(value - target) <= rtol * target for value in terminal)
    else:
        expected = [float(logistic_radius(float(r0), beta, q, horizon)) for r0 in radii]
        passed = all(
            abs(value - ref) <= rtol * ref for value, ref in zip(terminal, expected)
        )

    return AttractorReport(
        l_c=l_c,
        sigma=shifted.sigma,
        beta=beta,
        q=q,
        target_radius_sq=target,
        initial_radius_sq=[float(r0) for r0 in radii],
        terminal_radius_sq=terminal,
        direction_spread=_direction_spread(finals),
        seed=seed,
        dt=dt,
        horizon=horizon,
        rtol=rtol,
        passed=passed,
        final_states=finals,
    )


@dataclass(frozen=True)
class FieldSample:
    """Velocity, temperature and salinity perturbation at one grid point."""

    theta: float
    phi: float
    z: float
    u_theta: float
    u_phi: float
    w: float
    T: float
    S: float


def field_grid(n_theta: int, n_phi: int, n_z: int) -> List[Tuple[float, float, float]]:
    """Gauss nodes in cos theta, uniform phi, uniform z including both walls."""
    if n_theta < 1 or n_phi < 1 or n_z < 2:
        raise InvalidParameters("field grid needs n_theta, n_phi >= 1 and n_z >= 2")
    nodes, _ = np.polynomial.legendre.leggauss(n_theta)
    thetas = np.arccos(nodes)
    phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
    zs = np.linspace(0.0, 1.0, n_z)
    return [(float(t), float(p), float(z)) for t in thetas for p in phis for z in zs]


def _add_mode(
    acc: np.ndarray,
    amplitude: complex,
    l: int,
    m: int,
    n: int,
    theta_c: complex,
    phi_c: complex,
    params: Params,
    theta: np.ndarray,
    phi: np.ndarray,
    z: np.ndarray,
):
    """Accumulate amplitude * Psi_{lmn} into acc[(u_theta, u_phi, w, T, S)]."""
    y = ylm((l, m), theta, phi)
    d_theta, d_phi = ylm_gradient((l, m), theta, phi)
    k = n * math.pi
    alpha_sq = wavenumber_sq(l, params.r)
    cos_z, sin_z = np.cos(k * z), np.sin(k * z)
    acc[0] += amplitude * k * d_theta / params.r * cos_z
    acc[1] += amplitude * k * d_phi / params.r * cos_z
    acc[2] += amplitude * alpha_sq * y * sin_z
    acc[3] += amplitude * theta_c * y * sin_z
    acc[4] += amplitude * phi_c * y * sin_z


def reconstruct_fields(
    state: AmplitudeState,
    cm: CenterManifoldCoeffs,
    params: Params,
    grid: Sequence[Tuple[float, float, float]],
) -> List[FieldSample]:
    """Evaluate critical modes plus the center-manifold correction on a grid.

    Raises:
        ConstraintViolated: if the assembled fields are not real
    """
    if not grid:
        raise InvalidParameters("field grid is empty")
    l_c = state.l_c
    if cm.l_c != l_c:
        raise InvalidParameters("center-manifold coefficients belong to another l_c")

    points = np.asarray(grid, dtype=float)
    theta = np.clip(points[:, 0], POLE_CLEARANCE, math.pi - POLE_CLEARANCE)
    phi, z = points[:, 1], points[:, 2]
    acc = np.zeros((5, len(points)), dtype=complex)

    critical_beta = eigenvalues(l_c, 1, params).leading
    critical = mode_coefficients(ModeIndex(l_c, 0, 1), critical_beta, params)
    for m in range(-l_c, l_c + 1):
        amplitude = state.component(m)
        if amplitude != 0:
            _add_mode(acc, amplitude, l_c, m, 1, critical.theta, critical.phi,
                      params, theta, phi, z)

    amplitudes = center_manifold_amplitudes(cm, state.x)
    y00 = ylm((0, 0), theta, phi)
    sin_2z = np.sin(2.0 * math.pi * z)
    acc[3] += amplitudes[(0, 0, 1)] * y00 * sin_2z
    acc[4] += amplitudes[(0, 0, 2)] * y00 * sin_2z

    for l, betas in cm.beta.items():
        branch = [
            mode_coefficients(ModeIndex(l, 0, 2), beta, params) if coeff != 0 else None
            for beta, coeff in zip(betas, cm.higher[l])
        ]
        for mu in range(-l, l + 1):
            for k, coeffs in enumerate(branch, start=1):
                amplitude = amplitudes[(l, mu, k)]
                if amplitude != 0:
                    _add_mode(acc, amplitude, l, mu, 2, coeffs.theta, coeffs.phi,
                              params, theta, phi, z)

    scale = max(1.0, float(np.max(np.abs(acc))))
    residue = float(np.max(np.abs(acc.imag)))
    if residue > REALITY_TOL * scale:
        raise ConstraintViolated(f"reconstructed fields carry imaginary residue {residue:.3g}")

    values = acc.real
    return [
        FieldSample(
            theta=float(points[i, 0]),
            phi=float(phi[i]),
            z=float(z[i]),
            u_theta=float(values[0, i]),
            u_phi=float(values[1, i]),
            w=float(values[2, i]),
            T=float(values[3, i]),
            S=float(values[4, i]),
        )
        for i in range(len(points))
    ]


def fields_to_frame(samples: Sequence[FieldSample]) -> pd.DataFrame:
    return pd.DataFrame([asdict(sample) for sample in samples])


def trajectory_report(
    trajectory: Trajectory, beta: float, q: float
) -> Dict[str, Optional[float]]:
    """Terminal radius next to the attractor radius beta/q and the logistic prediction."""
    radius = trajectory.radius_sq
    predicted = float(logistic_radius(float(radius[0]), beta, q, trajectory.times[-1] - trajectory.times[0]))
    return {
        "terminal_radius_sq": float(radius[-1]),
        "attractor_radius_sq": beta / q if q > 0 and beta > 0 else None,
        "logistic_radius_sq": predicted,
    }
